#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "p2a/harness.hpp"
#include "p2a/util.hpp"

namespace p2a::harness {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Bounded pool over [0, jobs). Job bodies are expected to capture their own
// failures; anything that still escapes is rethrown after the join.
void parallel_for(int jobs, int workers, const std::function<void(int)>& fn) {
    if (jobs <= 0) return;
    int n = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, std::min(jobs, 8));
    if (n == 1) {
        for (int i = 0; i < jobs; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n));
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= jobs) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

const char* kMetricsHeader =
    "nh3_total_t,startstop_count,grid_cost_CNY,capex_om_CNY,net_revenue_CNY,"
    "cum_temp_variation_K,renewable_utilization";

std::string metrics_fields(const ScheduleMetrics& m) {
    std::string out;
    out += fmt_double(m.nh3_total);
    out += ',';
    out += std::to_string(m.startstop_count);
    out += ',';
    out += fmt_double(m.grid_cost);
    out += ',';
    out += fmt_double(m.capex_om);
    out += ',';
    out += fmt_double(m.net_revenue);
    out += ',';
    out += fmt_double(m.cum_temp_variation);
    out += ',';
    out += fmt_double(m.renewable_utilization);
    return out;
}

std::string blank_metrics_fields() { return ",,,,,,"; }

}  // namespace

ScheduleMetrics compute_metrics(const sched::Schedule& sch, const params::ScenarioProfile& s,
                                const params::ParamSet& p) {
    if (static_cast<int>(sch.steps.size()) != s.horizon_steps)
        throw ValidationError("schedule",
                              "length " + std::to_string(sch.steps.size()) +
                                  " does not match the scenario horizon " +
                                  std::to_string(s.horizon_steps));
    ScheduleMetrics m;
    double dt_h = sch.dt / 3600.0;
    double avail_wh = 0, used_wh = 0;
    for (size_t t = 0; t < sch.steps.size(); ++t) {
        const auto& r = sch.steps[t];
        m.nh3_total += r.nh3_output * dt_h;
        m.startstop_count += (r.inoff ? 1 : 0) + (r.outoff ? 1 : 0);
        if (t > 0) m.cum_temp_variation += std::abs(r.asr_temp - sch.steps[t - 1].asr_temp);
        double avail = s.wind[t] + s.pv[t];
        double draw = r.bes_charge + r.ms_heater_power + r.suh_power + r.aux_power +
                      r.h2_production * p.op.hp_specific_power - r.grid_import -
                      r.bes_discharge;
        used_wh += std::clamp(draw, 0.0, avail) * dt_h;
        avail_wh += avail * dt_h;
    }
    m.grid_cost = sch.breakdown.grid_cost;
    m.capex_om = sch.breakdown.capex_om_cost;
    m.net_revenue = sch.breakdown.net_revenue;
    m.renewable_utilization = avail_wh > 0 ? used_wh / avail_wh : 1.0;
    return m;
}

std::vector<SchemeRun> run_scheme_comparison(const params::ScenarioProfile& s,
                                             const params::ParamSet& p,
                                             const std::vector<params::StorageScheme>& schemes,
                                             const SolveFn& solver, int workers) {
    std::vector<SchemeRun> rows(schemes.size());
    parallel_for(static_cast<int>(schemes.size()), workers, [&](int i) {
        auto ui = static_cast<size_t>(i);
        auto& row = rows[ui];
        row.scheme = schemes[ui].name;
        try {
            auto b = sched::build_full_model(s, p, schemes[ui]);
            auto sol = solver(b.model);
            row.status = sol.status;
            if (sol.status == milp::SolveStatus::optimal) {
                row.schedule = sched::decode(b, sol);
                row.verify = sched::verify_schedule(row.schedule, s, b.p);
                row.metrics = compute_metrics(row.schedule, s, p);
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return rows;
}

std::string comparison_csv(const std::vector<SchemeRun>& rows) {
    std::string out = std::string("scheme,status,") + kMetricsHeader + "\n";
    for (const auto& r : rows) {
        out += r.scheme;
        out += ',';
        out += milp::status_name(r.status);
        out += ',';
        out += r.status == milp::SolveStatus::optimal ? metrics_fields(r.metrics)
                                                      : blank_metrics_fields();
        out += '\n';
    }
    return out;
}

const char* axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::bes_energy: return "bes_energy_J";
        case SweepAxis::hs_capacity: return "hs_capacity_Nm3";
        case SweepAxis::ms_volume: return "ms_volume_m3";
    }
    return "axis";
}

namespace {

params::StorageScheme cell_scheme(const params::StorageScheme& base, SweepAxis a, double v) {
    auto s = base;
    switch (a) {
        case SweepAxis::bes_energy:
            s.has_bes = v > 0;
            s.bes_energy = v;
            s.bes_power = v > 0 ? (base.has_bes ? base.bes_power : v / 3600.0) : 0;
            break;
        case SweepAxis::hs_capacity:
            s.has_hs = v > 0;
            s.hs_capacity = v;
            break;
        case SweepAxis::ms_volume:
            s.has_mstes = v > 0;
            s.ms_volume = v;
            break;
    }
    return s;
}

void check_grid(const char* field, const std::vector<double>& g) {
    if (g.empty()) throw ValidationError(field, "grid must not be empty");
    for (size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i]) || g[i] < 0)
            throw ValidationError(field, "grid values must be finite and non-negative");
        if (i > 0 && g[i] <= g[i - 1])
            throw ValidationError(field, "grid values must be strictly increasing");
    }
}

}  // namespace

std::vector<SweepCell> sensitivity_sweep(const params::ScenarioProfile& s,
                                         const params::ParamSet& p,
                                         const params::StorageScheme& base, SweepAxis axis1,
                                         const std::vector<double>& grid1, SweepAxis axis2,
                                         const std::vector<double>& grid2, const SolveFn& solver,
                                         int workers) {
    if (axis1 == axis2) throw ValidationError("axes", "the two sweep axes must differ");
    check_grid("grid1", grid1);
    check_grid("grid2", grid2);

    int n1 = static_cast<int>(grid1.size()), n2 = static_cast<int>(grid2.size());
    std::vector<SweepCell> cells(static_cast<size_t>(n1 * n2));
    parallel_for(n1 * n2, workers, [&](int idx) {
        auto ui = static_cast<size_t>(idx);
        auto& cell = cells[ui];
        cell.value1 = grid1[static_cast<size_t>(idx / n2)];
        cell.value2 = grid2[static_cast<size_t>(idx % n2)];
        try {
            auto scheme = cell_scheme(cell_scheme(base, axis1, cell.value1), axis2, cell.value2);
            auto b = sched::build_full_model(s, p, scheme);
            auto sol = solver(b.model);
            cell.status = sol.status;
            if (sol.status == milp::SolveStatus::optimal)
                cell.metrics = compute_metrics(sched::decode(b, sol), s, p);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    return cells;
}

std::string sweep_csv(SweepAxis axis1, SweepAxis axis2, const std::vector<SweepCell>& cells) {
    std::string out =
        std::string(axis_name(axis1)) + "," + axis_name(axis2) + ",net_revenue_CNY,cum_temp_K\n";
    for (const auto& c : cells) {
        if (c.status != milp::SolveStatus::optimal) continue;  // failed cells stay gaps
        out += fmt_double(c.value1);
        out += ',';
        out += fmt_double(c.value2);
        out += ',';
        out += fmt_double(c.metrics.net_revenue);
        out += ',';
        out += fmt_double(c.metrics.cum_temp_variation);
        out += '\n';
    }
    return out;
}

RollingResult run_rolling(const params::ScenarioProfile& profile, int window_steps,
                          const params::ParamSet& p,
                          const std::vector<params::StorageScheme>& schemes,
                          const SolveFn& solver, int workers) {
    if (window_steps <= 0) throw ValidationError("window_steps", "must be positive");
    int windows = profile.horizon_steps / window_steps;
    if (windows == 0)
        throw ValidationError("window_steps", "profile is shorter than a single window");

    RollingResult result;
    int dropped = profile.horizon_steps - windows * window_steps;
    if (dropped > 0)
        result.warnings.push_back("dropped " + std::to_string(dropped) +
                                  " trailing steps that do not fill a window");

    // Windows chain state within a scheme, so parallelism is across schemes.
    std::vector<std::vector<RollingRow>> per_scheme(schemes.size());
    parallel_for(static_cast<int>(schemes.size()), workers, [&](int si) {
        auto us = static_cast<size_t>(si);
        params::ScenarioProfile win;
        win.dt = profile.dt;
        win.horizon_steps = window_steps;
        win.initial_asr_temp = profile.initial_asr_temp;
        win.initial_ms_temp = profile.initial_ms_temp;
        win.initial_mode = profile.initial_mode;
        win.initial_load = profile.initial_load;
        win.initial_bes_energy = profile.initial_bes_energy;
        win.initial_hs_level = profile.initial_hs_level;
        win.initial_bes_frac = profile.initial_bes_frac;
        win.initial_hs_frac = profile.initial_hs_frac;

        for (int w = 0; w < windows; ++w) {
            auto begin = static_cast<size_t>(w * window_steps);
            win.wind.assign(profile.wind.begin() + static_cast<long>(begin),
                            profile.wind.begin() + static_cast<long>(begin + window_steps));
            win.pv.assign(profile.pv.begin() + static_cast<long>(begin),
                          profile.pv.begin() + static_cast<long>(begin + window_steps));
            win.ambient.resize(static_cast<size_t>(window_steps));
            for (int t = 0; t < window_steps; ++t)
                win.ambient[static_cast<size_t>(t)] =
                    params::ambient_at(profile, w * window_steps + t);

            RollingRow row;
            row.window = w;
            row.scheme = schemes[us].name;
            row.scheme_index = si;
            try {
                sched::BuildOptions o;
                o.cyclic_storage = false;  // the next window continues the story
                auto b = sched::build_full_model(win, p, schemes[us], o);
                auto sol = solver(b.model);
                row.status = sol.status;
                if (sol.status == milp::SolveStatus::optimal) {
                    auto sch = sched::decode(b, sol);
                    row.metrics = compute_metrics(sch, win, p);
                    const auto& last = sch.steps.back();
                    row.final_hs = std::clamp(last.hs_level, b.p.op.hs_min, b.p.op.hs_max);
                    row.final_bes = std::clamp(last.bes_energy, b.p.op.bes_energy_min,
                                               b.p.op.bes_energy_max);
                    win.initial_asr_temp = last.asr_temp;
                    win.initial_ms_temp = last.ms_temp;
                    win.initial_mode = last.mode;
                    win.initial_load = last.mode == params::Mode::production ? last.load : 0;
                    win.initial_hs_level = row.final_hs;
                    win.initial_bes_energy = row.final_bes;
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            bool ok = row.status == milp::SolveStatus::optimal;
            per_scheme[us].push_back(std::move(row));
            if (!ok) break;  // nothing sound to chain from
        }
    });
    for (auto& rows : per_scheme)
        for (auto& row : rows) result.rows.push_back(std::move(row));
    return result;
}

std::string rolling_csv(const RollingResult& r) {
    auto rows = r.rows;
    std::sort(rows.begin(), rows.end(), [](const RollingRow& a, const RollingRow& b) {
        if (a.window != b.window) return a.window < b.window;
        return a.scheme_index < b.scheme_index;
    });
    std::string out = std::string("window,scheme,status,") + kMetricsHeader + "\n";
    for (const auto& row : rows) {
        out += std::to_string(row.window);
        out += ',';
        out += row.scheme;
        out += ',';
        out += milp::status_name(row.status);
        out += ',';
        out += row.status == milp::SolveStatus::optimal ? metrics_fields(row.metrics)
                                                        : blank_metrics_fields();
        out += '\n';
    }
    return out;
}

std::vector<RollingTotals> rolling_totals(const RollingResult& r) {
    std::vector<RollingTotals> totals;
    auto find = [&](const std::string& scheme) -> RollingTotals& {
        for (auto& t : totals)
            if (t.scheme == scheme) return t;
        totals.push_back({scheme, 0, 0, 0, 0, 0, 0, 0});
        return totals.back();
    };
    for (const auto& row : r.rows) {
        if (row.status != milp::SolveStatus::optimal) continue;
        auto& t = find(row.scheme);
        ++t.windows_solved;
        t.nh3_total += row.metrics.nh3_total;
        t.startstop_count += row.metrics.startstop_count;
        t.grid_cost += row.metrics.grid_cost;
        t.capex_om += row.metrics.capex_om;
        t.net_revenue += row.metrics.net_revenue;
        t.cum_temp_variation += row.metrics.cum_temp_variation;
    }
    return totals;
}

params::ScenarioProfile gen_profile(const GenSpec& g) {
    if (g.steps <= 0) throw ValidationError("steps", "must be positive");
    if (!(g.dt > 0) || !std::isfinite(g.dt)) throw ValidationError("dt", "must be positive");
    if (!(g.pv_peak >= 0)) throw ValidationError("pv_peak", "must be non-negative");
    if (!(g.wind_mean >= 0)) throw ValidationError("wind_mean", "must be non-negative");
    if (!(g.wind_sigma >= 0)) throw ValidationError("wind_sigma", "must be non-negative");
    if (!(g.wind_ar1 >= 0 && g.wind_ar1 < 1))
        throw ValidationError("wind_ar1", "must lie in [0, 1)");
    for (const auto& [b, e] : g.lulls)
        if (b < 0 || e <= b || e > g.steps)
            throw ValidationError("lulls", "spans must satisfy 0 <= begin < end <= steps");

    std::mt19937_64 rng(g.seed);
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    auto gauss = [&] {
        double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    };

    params::ScenarioProfile s;
    s.dt = g.dt;
    s.horizon_steps = g.steps;
    s.wind.resize(static_cast<size_t>(g.steps));
    s.pv.resize(static_cast<size_t>(g.steps));
    s.ambient = {g.ambient};
    s.initial_asr_temp = 733;
    s.initial_ms_temp = 810;
    s.initial_mode = params::Mode::standby;

    double x = g.wind_sigma * gauss();  // start at the stationary distribution
    double innov = g.wind_sigma * std::sqrt(1.0 - g.wind_ar1 * g.wind_ar1);
    for (int t = 0; t < g.steps; ++t) {
        s.wind[static_cast<size_t>(t)] = std::max(0.0, g.wind_mean + x);
        x = g.wind_ar1 * x + innov * gauss();
        double hour = std::fmod(static_cast<double>(t) * g.dt / 3600.0, 24.0);
        double arc = std::sin(kPi * (hour - 6.0) / 12.0);
        s.pv[static_cast<size_t>(t)] = g.pv_peak * std::max(0.0, arc);
    }
    // Lulls cut after the draws, so adding one leaves the rest of the series
    // untouched for the same seed.
    for (const auto& [b, e] : g.lulls)
        for (int t = b; t < e; ++t) {
            s.wind[static_cast<size_t>(t)] = 0;
            s.pv[static_cast<size_t>(t)] = 0;
        }
    return s;
}

}  // namespace p2a::harness
