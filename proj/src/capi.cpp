#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <type_traits>
#include <vector>

#include "p2asched.h"

#include "p2a/harness.hpp"
#include "p2a/igdt.hpp"
#include "p2a/milp.hpp"
#include "p2a/params.hpp"
#include "p2a/sched.hpp"
#include "p2a/util.hpp"

using namespace p2a;

struct p2a_params {
    params::ParamSet p;
};
struct p2a_scenario {
    params::ScenarioProfile s;
};
struct p2a_schedule {
    sched::Schedule sch;
};

namespace {

thread_local std::string g_error;

p2a_status fail(p2a_status code, const std::string& msg) {
    g_error = msg;
    return code;
}

p2a_status einval(const char* msg) { return fail(P2A_EINVAL, msg); }

p2a_status map_kind(Error::Kind k) {
    switch (k) {
        case Error::Kind::validation: return P2A_EVALID;
        case Error::Kind::parse: return P2A_EPARSE;
        case Error::Kind::io: return P2A_EIO;
        case Error::Kind::solve: return P2A_ESOLVE;
        case Error::Kind::internal: return P2A_EINTERNAL;
    }
    return P2A_EINTERNAL;
}

template <typename Fn>
p2a_status guarded(Fn&& fn) {
    try {
        if constexpr (std::is_void_v<std::invoke_result_t<Fn>>) {
            fn();
            return P2A_OK;
        } else {
            return fn();
        }
    } catch (const Error& e) {
        return fail(map_kind(e.kind), e.what());
    } catch (const std::exception& e) {
        return fail(P2A_EINTERNAL, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

p2a_status out_string(const std::string& s, char** out) {
    *out = dup_string(s);
    return *out ? P2A_OK : fail(P2A_EINTERNAL, "allocation failed");
}

milp::SolverSpec solver_spec(const char* solver) {
    milp::SolverSpec sp;
    if (!solver || !*solver || std::strcmp(solver, "tiny") == 0)
        sp.use_tiny = true;
    else
        sp.command = solver;
    return sp;
}

harness::SolveFn solve_fn(const p2a_params* p, const char* solver) {
    auto spec = solver_spec(solver);
    auto tol = p->p.tol;
    return [spec, tol](const milp::MilpModel& m) { return milp::solve(m, spec, tol); };
}

std::vector<params::StorageScheme> parse_schemes(const char* schemes) {
    std::vector<params::StorageScheme> out;
    for (const auto& part : split(schemes, ',')) {
        auto name = trim(part);
        if (!name.empty()) out.push_back(params::builtin_scheme(name));
    }
    if (out.empty()) throw ValidationError("schemes", "no scheme names given");
    return out;
}

harness::SweepAxis parse_axis(const char* name) {
    std::string n = name ? name : "";
    if (n == "bes_energy") return harness::SweepAxis::bes_energy;
    if (n == "hs_capacity") return harness::SweepAxis::hs_capacity;
    if (n == "ms_volume") return harness::SweepAxis::ms_volume;
    throw ValidationError("axis", "unknown sweep axis '" + n + "'");
}

int to_c_status(milp::SolveStatus s) {
    switch (s) {
        case milp::SolveStatus::optimal: return P2A_SOLVE_OPTIMAL;
        case milp::SolveStatus::infeasible: return P2A_SOLVE_INFEASIBLE;
        case milp::SolveStatus::unbounded: return P2A_SOLVE_UNBOUNDED;
        case milp::SolveStatus::limit: return P2A_SOLVE_LIMIT;
    }
    return P2A_SOLVE_LIMIT;
}

void fill_verify(const sched::VerifyReport& r, p2a_verify* out) {
    out->empty = r.empty ? 1 : 0;
    out->max_asr_dev = r.max_asr_dev;
    out->asr_worst_step = r.asr_worst_step;
    out->max_ms_dev = r.max_ms_dev;
    out->ms_worst_step = r.ms_worst_step;
    out->hs_residual = r.hs_residual;
    out->hs_worst_step = r.hs_worst_step;
    out->bes_residual = r.bes_residual;
    out->bes_worst_step = r.bes_worst_step;
    out->power_violation = r.power_violation;
    out->power_worst_step = r.power_worst_step;
}

}  // namespace

extern "C" {

const char* p2a_version(void) { return "1.0.0"; }

const char* p2a_last_error(void) { return g_error.c_str(); }

void p2a_string_free(char* s) { std::free(s); }

p2a_status p2a_params_create(p2a_params** out) {
    if (!out) return einval("null output pointer");
    return guarded([&] { *out = new p2a_params{params::defaults()}; });
}

p2a_status p2a_params_load(const char* config_path, p2a_params** out) {
    if (!config_path || !out) return einval("null argument");
    return guarded([&] { *out = new p2a_params{params::load_config(config_path)}; });
}

p2a_status p2a_params_apply(p2a_params* p, const char* config_path) {
    if (!p || !config_path) return einval("null argument");
    return guarded([&] {
        auto kv = KvFile::parse_file(config_path);
        params::apply_config(p->p, kv);
    });
}

void p2a_params_free(p2a_params* p) { delete p; }

p2a_status p2a_estimate_vessel(const char* geometry_path, double* asr_capacitance,
                               double* asr_loss_resistance, double* tank_loss_resistance) {
    if (!geometry_path) return einval("null geometry path");
    return guarded([&] {
        auto gs = params::load_geometry(geometry_path);
        if (asr_capacitance) *asr_capacitance = params::estimate_capacitance(gs.asr);
        if (asr_loss_resistance) *asr_loss_resistance = params::estimate_loss_resistance(gs.asr);
        if (tank_loss_resistance)
            *tank_loss_resistance = params::estimate_loss_resistance(gs.tank);
    });
}

p2a_status p2a_scenario_load(const char* csv_path, const char* sidecar_path,
                             p2a_scenario** out) {
    if (!csv_path || !sidecar_path || !out) return einval("null argument");
    return guarded([&] {
        *out = new p2a_scenario{params::load_scenario(csv_path, sidecar_path)};
    });
}

p2a_status p2a_scenario_generate(const p2a_genspec* spec, p2a_scenario** out) {
    if (!spec || !out) return einval("null argument");
    if (spec->lull_count > 0 && !spec->lulls) return einval("lull_count without lulls");
    return guarded([&] {
        harness::GenSpec g;
        g.steps = spec->steps;
        g.dt = spec->dt;
        g.seed = spec->seed;
        g.pv_peak = spec->pv_peak;
        g.wind_mean = spec->wind_mean;
        g.wind_sigma = spec->wind_sigma;
        g.wind_ar1 = spec->wind_ar1;
        g.ambient = spec->ambient;
        for (int i = 0; i < spec->lull_count; ++i)
            g.lulls.emplace_back(spec->lulls[i].begin, spec->lulls[i].end);
        *out = new p2a_scenario{harness::gen_profile(g)};
    });
}

p2a_status p2a_scenario_save(const p2a_scenario* s, const char* csv_path,
                             const char* sidecar_path) {
    if (!s || !csv_path || !sidecar_path) return einval("null argument");
    return guarded([&] {
        std::ofstream csv(csv_path);
        if (!csv) throw IoError(std::string("cannot write ") + csv_path);
        csv << "wind_W,pv_W,ambient_K\n";
        for (int t = 0; t < s->s.horizon_steps; ++t) {
            auto ut = static_cast<size_t>(t);
            csv << fmt_double(s->s.wind[ut]) << ',' << fmt_double(s->s.pv[ut]) << ','
                << fmt_double(params::ambient_at(s->s, t)) << '\n';
        }
        if (!csv.flush()) throw IoError(std::string("short write to ") + csv_path);

        std::ofstream kv(sidecar_path);
        if (!kv) throw IoError(std::string("cannot write ") + sidecar_path);
        kv << "dt_s = " << fmt_double(s->s.dt) << '\n';
        kv << "initial_asr_temp_K = " << fmt_double(s->s.initial_asr_temp) << '\n';
        kv << "initial_ms_temp_K = " << fmt_double(s->s.initial_ms_temp) << '\n';
        kv << "initial_mode = " << params::mode_name(s->s.initial_mode) << '\n';
        kv << "initial_load = " << fmt_double(s->s.initial_load) << '\n';
        if (s->s.initial_bes_energy)
            kv << "initial_bes_energy_J = " << fmt_double(*s->s.initial_bes_energy) << '\n';
        else
            kv << "initial_bes_frac = " << fmt_double(s->s.initial_bes_frac) << '\n';
        if (s->s.initial_hs_level)
            kv << "initial_hs_level_Nm3 = " << fmt_double(*s->s.initial_hs_level) << '\n';
        else
            kv << "initial_hs_frac = " << fmt_double(s->s.initial_hs_frac) << '\n';
        if (!kv.flush()) throw IoError(std::string("short write to ") + sidecar_path);
    });
}

int p2a_scenario_steps(const p2a_scenario* s) { return s ? s->s.horizon_steps : -1; }

p2a_status p2a_scenario_truncate(p2a_scenario* s, int steps) {
    if (!s) return einval("null scenario");
    return guarded([&] {
        if (steps <= 0 || steps > s->s.horizon_steps)
            throw ValidationError("steps", "truncation length outside the profile");
        auto n = static_cast<size_t>(steps);
        s->s.wind.resize(n);
        s->s.pv.resize(n);
        if (s->s.ambient.size() > n) s->s.ambient.resize(n);
        s->s.horizon_steps = steps;
    });
}

p2a_status p2a_scenario_set_dt(p2a_scenario* s, double dt) {
    if (!s) return einval("null scenario");
    return guarded([&] {
        if (!(dt > 0) || dt > 86400.0) throw ValidationError("dt", "must be in (0, 86400] s");
        s->s.dt = dt;
    });
}

double p2a_scenario_dt(const p2a_scenario* s) { return s ? s->s.dt : 0; }

void p2a_scenario_free(p2a_scenario* s) { delete s; }

p2a_status p2a_solve(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                     const char* solver, p2a_schedule** out) {
    if (!s || !p || !scheme || !out) return einval("null argument");
    return guarded([&] {
        auto b = sched::build_full_model(s->s, p->p, params::builtin_scheme(scheme));
        auto sol = milp::solve(b.model, solver_spec(solver), p->p.tol);
        sched::Schedule sch;
        sch.status = sol.status;
        if (sol.status == milp::SolveStatus::optimal) sch = sched::decode(b, sol);
        *out = new p2a_schedule{std::move(sch)};
    });
}

p2a_status p2a_solve_gap(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                         const char* solver, int opportunistic, double beta,
                         double* alpha_out, double* baseline_out, p2a_schedule** out) {
    if (!s || !p || !scheme || !out) return einval("null argument");
    return guarded([&] {
        auto sc = params::builtin_scheme(scheme);
        auto fn = solve_fn(p, solver);
        auto r = opportunistic ? igdt::solve_opportunistic(s->s, p->p, sc, beta, fn)
                               : igdt::solve_robust(s->s, p->p, sc, beta, fn);
        if (alpha_out) *alpha_out = r.alpha;
        if (baseline_out) *baseline_out = r.baseline;
        r.schedule.status = r.status;
        *out = new p2a_schedule{std::move(r.schedule)};
    });
}

int p2a_schedule_status(const p2a_schedule* h) {
    return h ? to_c_status(h->sch.status) : -1;
}

int p2a_schedule_steps(const p2a_schedule* h) {
    return h ? static_cast<int>(h->sch.steps.size()) : -1;
}

p2a_status p2a_schedule_to_csv(const p2a_schedule* h, char** out) {
    if (!h || !out) return einval("null argument");
    return guarded([&] { return out_string(sched::schedule_to_csv(h->sch), out); });
}

p2a_status p2a_schedule_from_csv(const char* text, p2a_schedule** out) {
    if (!text || !out) return einval("null argument");
    return guarded([&] {
        *out = new p2a_schedule{sched::schedule_from_csv(text, "schedule")};
    });
}

p2a_status p2a_schedule_breakdown(const p2a_schedule* h, p2a_breakdown* out) {
    if (!h || !out) return einval("null argument");
    const auto& b = h->sch.breakdown;
    out->ammonia_revenue = b.ammonia_revenue;
    out->grid_cost = b.grid_cost;
    out->startup_cost = b.startup_cost;
    out->capex_om_cost = b.capex_om_cost;
    out->temp_penalty = b.temp_penalty;
    out->net_revenue = b.net_revenue;
    out->objective = b.objective;
    return P2A_OK;
}

p2a_status p2a_schedule_metrics(const p2a_schedule* h, const p2a_scenario* s,
                                const p2a_params* p, p2a_metrics* out) {
    if (!h || !s || !p || !out) return einval("null argument");
    return guarded([&] {
        auto m = harness::compute_metrics(h->sch, s->s, p->p);
        out->nh3_total = m.nh3_total;
        out->startstop_count = m.startstop_count;
        out->grid_cost = m.grid_cost;
        out->capex_om = m.capex_om;
        out->net_revenue = m.net_revenue;
        out->cum_temp_variation = m.cum_temp_variation;
        out->renewable_utilization = m.renewable_utilization;
    });
}

p2a_status p2a_schedule_verify(const p2a_schedule* h, const p2a_scenario* s,
                               const p2a_params* p, const char* scheme, p2a_verify* out) {
    if (!h || !s || !p || !scheme || !out) return einval("null argument");
    return guarded([&] {
        auto effective = sched::apply_scheme(p->p, params::builtin_scheme(scheme));
        fill_verify(sched::verify_schedule(h->sch, s->s, effective), out);
    });
}

void p2a_schedule_free(p2a_schedule* h) { delete h; }

p2a_status p2a_compare_csv(const p2a_scenario* s, const p2a_params* p, const char* schemes,
                           const char* solver, char** csv_out) {
    if (!s || !p || !schemes || !csv_out) return einval("null argument");
    return guarded([&] {
        auto rows = harness::run_scheme_comparison(s->s, p->p, parse_schemes(schemes),
                                                   solve_fn(p, solver));
        return out_string(harness::comparison_csv(rows), csv_out);
    });
}

p2a_status p2a_sweep_csv(const p2a_scenario* s, const p2a_params* p, const char* base_scheme,
                         const char* axis1, const double* grid1, int n1, const char* axis2,
                         const double* grid2, int n2, const char* solver, char** csv_out) {
    if (!s || !p || !base_scheme || !axis1 || !axis2 || !csv_out) return einval("null argument");
    if (n1 <= 0 || n2 <= 0 || !grid1 || !grid2) return einval("empty sweep grid");
    return guarded([&] {
        auto a1 = parse_axis(axis1);
        auto a2 = parse_axis(axis2);
        std::vector<double> g1(grid1, grid1 + n1), g2(grid2, grid2 + n2);
        auto cells = harness::sensitivity_sweep(s->s, p->p, params::builtin_scheme(base_scheme),
                                                a1, g1, a2, g2, solve_fn(p, solver));
        return out_string(harness::sweep_csv(a1, a2, cells), csv_out);
    });
}

p2a_status p2a_rolling_csv(const p2a_scenario* s, const p2a_params* p, int window_steps,
                           const char* schemes, const char* solver, char** rows_csv,
                           char** warnings_out) {
    if (!s || !p || !schemes || !rows_csv) return einval("null argument");
    return guarded([&] {
        auto r = harness::run_rolling(s->s, window_steps, p->p, parse_schemes(schemes),
                                      solve_fn(p, solver));
        std::string warn;
        for (const auto& w : r.warnings) {
            warn += w;
            warn += '\n';
        }
        if (warnings_out) {
            auto st = out_string(warn, warnings_out);
            if (st != P2A_OK) return st;
        }
        return out_string(harness::rolling_csv(r), rows_csv);
    });
}

p2a_status p2a_gap_sweep_csv(const p2a_scenario* s, const p2a_params* p, const char* scheme,
                             const char* solver, int opportunistic, const double* betas,
                             int n, char** csv_out) {
    if (!s || !p || !scheme || !csv_out) return einval("null argument");
    if (n <= 0 || !betas) return einval("empty beta list");
    return guarded([&] {
        auto dir = opportunistic ? igdt::Direction::opportunistic : igdt::Direction::robust;
        std::vector<double> bs(betas, betas + n);
        auto pts = igdt::sweep(s->s, p->p, params::builtin_scheme(scheme), dir, bs,
                               solve_fn(p, solver));
        return out_string(igdt::sweep_to_csv(pts), csv_out);
    });
}

}  // extern "C"
