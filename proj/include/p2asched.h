#ifndef P2ASCHED_H
#define P2ASCHED_H

/* C interface to the power-to-ammonia scheduling core.
 *
 * Every object lives behind an opaque handle and every fallible call returns
 * a p2a_status; P2A_OK is zero. On failure p2a_last_error() describes what
 * went wrong (the buffer is thread-local and overwritten by the next failing
 * call on the same thread). Strings returned through char** out-parameters
 * are heap copies owned by the caller; release them with p2a_string_free.
 *
 * Solver selection: pass NULL or "tiny" for the bundled branch-and-bound
 * solver (small models only), or a shell command template containing the
 * placeholders {lp} and {sol} to drive an external MILP solver through
 * LP-file exchange.
 */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum p2a_status {
    P2A_OK = 0,
    P2A_EINVAL = 1,   /* null handle, bad argument */
    P2A_EVALID = 2,   /* input failed validation */
    P2A_EPARSE = 3,   /* file or text could not be parsed */
    P2A_EIO = 4,      /* file could not be read or written */
    P2A_ESOLVE = 5,   /* solver process or solve protocol failure */
    P2A_EINTERNAL = 6
} p2a_status;

typedef enum p2a_solve_status {
    P2A_SOLVE_OPTIMAL = 0,
    P2A_SOLVE_INFEASIBLE = 1,
    P2A_SOLVE_UNBOUNDED = 2,
    P2A_SOLVE_LIMIT = 3
} p2a_solve_status;

typedef struct p2a_params p2a_params;
typedef struct p2a_scenario p2a_scenario;
typedef struct p2a_schedule p2a_schedule;

typedef struct p2a_breakdown {
    double ammonia_revenue; /* CNY */
    double grid_cost;
    double startup_cost;
    double capex_om_cost;
    double temp_penalty; /* K, weighted into the objective */
    double net_revenue;
    double objective;
} p2a_breakdown;

typedef struct p2a_metrics {
    double nh3_total;             /* t */
    int startstop_count;
    double grid_cost;             /* CNY */
    double capex_om;              /* CNY */
    double net_revenue;           /* CNY */
    double cum_temp_variation;    /* K */
    double renewable_utilization; /* 0..1 */
} p2a_metrics;

typedef struct p2a_verify {
    int empty;              /* 1 when there was nothing to check */
    double max_asr_dev;     /* K, worst reactor gap vs continuous replay */
    int asr_worst_step;
    double max_ms_dev;      /* K */
    int ms_worst_step;
    double hs_residual;     /* Nm3, worst buffer bookkeeping gap */
    int hs_worst_step;
    double bes_residual;    /* J */
    int bes_worst_step;
    double power_violation; /* W, worst supply shortfall */
    int power_worst_step;
} p2a_verify;

typedef struct p2a_lull {
    int begin; /* first zeroed step */
    int end;   /* one past the last zeroed step */
} p2a_lull;

typedef struct p2a_genspec {
    int steps;
    double dt;         /* s */
    uint64_t seed;
    double pv_peak;    /* W at solar noon */
    double wind_mean;  /* W */
    double wind_sigma; /* W */
    double wind_ar1;   /* hour-to-hour persistence, [0,1) */
    double ambient;    /* K */
    const p2a_lull* lulls;
    int lull_count;
} p2a_genspec;

const char* p2a_version(void);
const char* p2a_last_error(void);
void p2a_string_free(char* s);

/* Parameters ---------------------------------------------------------- */

p2a_status p2a_params_create(p2a_params** out);
p2a_status p2a_params_load(const char* config_path, p2a_params** out);
/* Merge a further config file over an existing set. */
p2a_status p2a_params_apply(p2a_params* p, const char* config_path);
void p2a_params_free(p2a_params* p);

/* Thermal lump estimates from a vessel geometry file. Any output pointer
 * may be NULL. */
p2a_status p2a_estimate_vessel(const char* geometry_path, double* asr_capacitance,
                               double* asr_loss_resistance, double* tank_loss_resistance);

/* Scenarios ------------------------------------------------------------ */

p2a_status p2a_scenario_load(const char* csv_path, const char* sidecar_path,
                             p2a_scenario** out);
p2a_status p2a_scenario_generate(const p2a_genspec* spec, p2a_scenario** out);
p2a_status p2a_scenario_save(const p2a_scenario* s, const char* csv_path,
                             const char* sidecar_path);
int p2a_scenario_steps(const p2a_scenario* s); /* -1 on null */
double p2a_scenario_dt(const p2a_scenario* s); /* seconds, 0 on null */
/* Keep only the first `steps` steps of the profile. */
p2a_status p2a_scenario_truncate(p2a_scenario* s, int steps);
p2a_status p2a_scenario_set_dt(p2a_scenario* s, double dt);
void p2a_scenario_free(p2a_scenario* s);

/* Scheduling ------------------------------------------------------------ */

/* scheme: one of scheme1..scheme5 or "none". */
p2a_status p2a_solve(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                     const char* solver, p2a_schedule** out);

/* Gap-based robust (opportunistic=0) or windfall (opportunistic=1) solve.
 * beta is the accepted revenue deviation fraction against the deterministic
 * anchor. alpha_out/baseline_out may be NULL. */
p2a_status p2a_solve_gap(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                         const char* solver, int opportunistic, double beta,
                         double* alpha_out, double* baseline_out, p2a_schedule** out);

int p2a_schedule_status(const p2a_schedule* h); /* p2a_solve_status, -1 on null */
int p2a_schedule_steps(const p2a_schedule* h);  /* -1 on null */
p2a_status p2a_schedule_to_csv(const p2a_schedule* h, char** out);
p2a_status p2a_schedule_from_csv(const char* text, p2a_schedule** out);
p2a_status p2a_schedule_breakdown(const p2a_schedule* h, p2a_breakdown* out);
p2a_status p2a_schedule_metrics(const p2a_schedule* h, const p2a_scenario* s,
                                const p2a_params* p, p2a_metrics* out);
/* Independent continuous-time replay of the thermal story plus storage and
 * power bookkeeping. scheme must name the configuration the schedule was
 * solved under. */
p2a_status p2a_schedule_verify(const p2a_schedule* h, const p2a_scenario* s,
                               const p2a_params* p, const char* scheme, p2a_verify* out);
void p2a_schedule_free(p2a_schedule* h);

/* Batch runs; results come back as CSV text ----------------------------- */

/* schemes: comma-separated list, e.g. "none,scheme2,scheme4". */
p2a_status p2a_compare_csv(const p2a_scenario* s, const p2a_params* p, const char* schemes,
                           const char* solver, char** csv_out);

/* axis names: bes_energy, hs_capacity, ms_volume. */
p2a_status p2a_sweep_csv(const p2a_scenario* s, const p2a_params* p, const char* base_scheme,
                         const char* axis1, const double* grid1, int n1, const char* axis2,
                         const double* grid2, int n2, const char* solver, char** csv_out);

p2a_status p2a_rolling_csv(const p2a_scenario* s, const p2a_params* p, int window_steps,
                           const char* schemes, const char* solver, char** rows_csv,
                           char** warnings_out);

p2a_status p2a_gap_sweep_csv(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                             const char* solver, int opportunistic, const double* betas,
                             int n, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* P2ASCHED_H */
