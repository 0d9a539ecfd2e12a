#pragma once

#include <string>
#include <vector>

#include "p2a/milp.hpp"
#include "p2a/params.hpp"

// Deterministic scheduling model: unit commitment of the synthesis loop with
// the reactor and salt-tank energy balances embedded as difference equations,
// hydrogen buffering, battery dispatch, and the weighted profit versus
// temperature-deviation objective. Builders fill a MilpModel; decode and
// verify_schedule turn solutions back into checked physical trajectories.

namespace p2a::sched {

// Variable handles for one scheduling step. Binaries first: four plant
// states, four transition events, salt-loop routing, battery direction.
struct StepVars {
    milp::VarRef off, cs, on, by;
    milp::VarRef startup, shutdown, inoff, outoff;
    milp::VarRef ms_on, ms_by, cha, dis;

    milp::VarRef load;
    milp::VarRef asr_temp, ms_temp;     // K at the end of the step
    milp::VarRef q_ms, q_su, q_cool;    // W thermal
    milp::VarRef p_ms, p_su;            // W electric
    milp::VarRef f_hp, f_h2as;          // Nm3/h
    milp::VarRef f_nh3;                 // t/h
    milp::VarRef hs, bes;               // buffer level / stored energy, end of step
    milp::VarRef p_cha, p_dis, p_grid;  // W
    milp::VarRef p_aux;                 // W
    milp::VarRef d_pos, d_neg;          // K, deviation split around the setpoint
};

enum class Embed { none, robust, opportunistic };

struct BuildOptions {
    bool cyclic_storage = true;
    // Uniform factor applied to the renewable series (fixed-uncertainty oracle).
    double res_scale = 1.0;
    // Gap-embedding: adds a scalar uncertainty variable and a revenue floor.
    Embed embed = Embed::none;
    double beta = 0;              // allowed revenue deviation fraction
    double baseline_revenue = 0;  // CNY anchor for the floor
    double alpha_max = 1.0;       // upper bound on the opportunistic deviation
};

struct ModelBundle {
    milp::MilpModel model;
    std::vector<StepVars> steps;
    milp::VarRef alpha;         // valid only when options.embed != none
    milp::LinExpr net_revenue;  // CNY over the horizon, capital charge folded in
    milp::LinExpr penalty;      // K, summed deviation splits
    double capex_om = 0;        // CNY over the horizon
    double t_floor = 0;         // K, reactor lower bound backing the big-M values
    params::StorageScheme scheme;
    params::ParamSet p;  // effective (scheme-adjusted) parameters
    params::ScenarioProfile scenario;
    BuildOptions options;
};

// Overlays a storage scheme onto base parameters: storage bounds become the
// 10-90% working band of the nameplate, the salt volume follows the scheme,
// and the storage component cost bases follow the installed capacities.
// Throws ValidationError on inconsistent scheme fields.
params::ParamSet apply_scheme(const params::ParamSet& base, const params::StorageScheme& scheme);

// Initial storage levels: explicit values are used verbatim (validated against
// the working band), otherwise the fractional spec resolves against the band.
double initial_bes_energy(const params::ScenarioProfile& s, const params::OperationalParams& op);
double initial_hs_level(const params::ScenarioProfile& s, const params::OperationalParams& op);

// Creates every decision variable (12 binaries per step plus the continuous
// block) with bounds, fixing what the scheme rules out. No rows yet.
ModelBundle make_variables(const params::ScenarioProfile& scenario,
                           const params::ParamSet& effective,
                           const params::StorageScheme& scheme, const BuildOptions& options);

// Constraint groups; build_full_model composes all of them in order.
void build_state_logic(ModelBundle& b);        // exclusivity, transitions, events, temp gate
void build_load_constraints(ModelBundle& b);   // load bounds, ramps, boundary pinning
void build_thermal_constraints(ModelBundle& b);// lump balances, duty caps and gates
void build_mass_and_power(ModelBundle& b);     // H2/NH3 scaling, storage, power balance
void build_objective(ModelBundle& b);          // revenue, penalty epigraph, embeds

ModelBundle build_full_model(const params::ScenarioProfile& scenario,
                             const params::ParamSet& base, const params::StorageScheme& scheme,
                             const BuildOptions& options = {});

struct StepRecord {
    params::Mode mode = params::Mode::shutdown;
    bool startup = false, shutdown = false, inoff = false, outoff = false;
    double load = 0;
    double h2_production = 0;  // Nm3/h out of the electrolyzer
    double h2_to_as = 0;       // Nm3/h into synthesis
    double hs_level = 0;       // Nm3 at the end of the step
    double bes_energy = 0;     // J at the end of the step
    double bes_charge = 0, bes_discharge = 0;  // W
    double grid_import = 0;                    // W
    bool ms_on = false;
    double ms_heat_duty = 0, suh_heat_duty = 0, cooling_duty = 0;  // W thermal
    double ms_heater_power = 0, suh_power = 0;                     // W electric
    double asr_temp = 0, ms_temp = 0;                              // K, end of step
    double aux_power = 0;                                          // W
    double nh3_output = 0;                                         // t/h
};

struct ObjectiveBreakdown {
    double ammonia_revenue = 0;  // CNY
    double grid_cost = 0;        // CNY
    double startup_cost = 0;     // CNY
    double capex_om_cost = 0;    // CNY
    double temp_penalty = 0;     // K, |T - setpoint| summed over commissioned steps
    double net_revenue = 0;      // ammonia - grid - startup - capex
    double objective = 0;        // w1 * net_revenue - w2 * temp_penalty
};

struct Schedule {
    double dt = 3600;  // s
    std::vector<StepRecord> steps;
    ObjectiveBreakdown breakdown;
    milp::SolveStatus status = milp::SolveStatus::optimal;
};

// Turns a solved model back into a schedule. Binaries are rounded within the
// integrality tolerance; two plant states above 0.5 in one step is an error.
// The breakdown is recomputed from first principles and, for plain optimal
// solves, cross-checked against the solver objective (1e-4 relative).
Schedule decode(const ModelBundle& b, const milp::Solution& sol);

struct VerifyReport {
    bool empty = false;
    double max_asr_dev = 0, max_ms_dev = 0;  // K vs the continuous replay
    int asr_worst_step = -1, ms_worst_step = -1;
    double hs_residual = 0, bes_residual = 0;  // worst one-step balance error
    int hs_worst_step = -1, bes_worst_step = -1;
    double power_violation = 0;  // W, worst supply shortfall
    int power_worst_step = -1;
};

// Independent re-verification: replays the schedule's drives through the
// continuous thermal model and recomputes every storage and power balance
// against the raw scenario series (callers scale the scenario first when
// checking an uncertainty-adjusted solution).
VerifyReport verify_schedule(const Schedule& s, const params::ScenarioProfile& scenario,
                             const params::ParamSet& effective);

// CSV round trip, one row per step, documented in docs/formats.md.
std::string schedule_to_csv(const Schedule& s);
Schedule schedule_from_csv(const std::string& text, const std::string& context);

}  // namespace p2a::sched
