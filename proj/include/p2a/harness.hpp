#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "p2a/milp.hpp"
#include "p2a/params.hpp"
#include "p2a/sched.hpp"

namespace p2a::harness {

// One callback serves both the bundled branch-and-bound and external solver
// processes. Calls may come from worker threads concurrently.
using SolveFn = std::function<milp::Solution(const milp::MilpModel&)>;

struct ScheduleMetrics {
    double nh3_total = 0;              // t over the horizon
    int startstop_count = 0;           // transitions into plus out of the off state
    double grid_cost = 0;              // CNY
    double capex_om = 0;               // CNY prorated to the horizon
    double net_revenue = 0;            // CNY
    double cum_temp_variation = 0;     // K, |dT| summed between consecutive steps
    double renewable_utilization = 1;  // consumed share of offered renewable energy
};

// The scenario supplies the renewable availability that utilization is
// measured against. Throws on a schedule/scenario length mismatch.
ScheduleMetrics compute_metrics(const sched::Schedule& sch, const params::ScenarioProfile& s,
                                const params::ParamSet& p);

struct SchemeRun {
    std::string scheme;
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    std::string error;           // non-empty when the solve threw
    ScheduleMetrics metrics;     // valid when status is optimal
    sched::VerifyReport verify;  // ditto
    sched::Schedule schedule;    // ditto
};

// One deterministic solve, verification replay, and metrics row per scheme.
// A scheme that fails is recorded and the run continues; rows keep the input
// order regardless of worker count. workers <= 0 picks a bounded default.
std::vector<SchemeRun> run_scheme_comparison(const params::ScenarioProfile& s,
                                             const params::ParamSet& p,
                                             const std::vector<params::StorageScheme>& schemes,
                                             const SolveFn& solver, int workers = 0);
std::string comparison_csv(const std::vector<SchemeRun>& rows);

enum class SweepAxis { bes_energy, hs_capacity, ms_volume };
const char* axis_name(SweepAxis a);

struct SweepCell {
    double value1 = 0, value2 = 0;
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    std::string error;
    ScheduleMetrics metrics;
};

// Re-solves the scenario over the cross product of two capacity grids layered
// on the base scheme. Grids must be strictly increasing; a zero value removes
// the component, and a battery added onto a scheme that had none gets a
// one-hour charge rating. Failed cells are recorded and left out of the CSV.
std::vector<SweepCell> sensitivity_sweep(const params::ScenarioProfile& s,
                                         const params::ParamSet& p,
                                         const params::StorageScheme& base, SweepAxis axis1,
                                         const std::vector<double>& grid1, SweepAxis axis2,
                                         const std::vector<double>& grid2, const SolveFn& solver,
                                         int workers = 0);
std::string sweep_csv(SweepAxis axis1, SweepAxis axis2, const std::vector<SweepCell>& cells);

struct RollingRow {
    int window = 0;
    std::string scheme;
    int scheme_index = 0;
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    std::string error;
    ScheduleMetrics metrics;
    double final_hs = 0;   // Nm3 handed to the next window
    double final_bes = 0;  // J handed to the next window
};

struct RollingResult {
    std::vector<RollingRow> rows;  // scheme-major, windows in order inside
    std::vector<std::string> warnings;
};

// Splits the profile into consecutive windows and chains reactor, salt, and
// storage state forward instead of cyclic closure. A window that fails stops
// that scheme's chain; a trailing partial window is dropped with a warning.
RollingResult run_rolling(const params::ScenarioProfile& profile, int window_steps,
                          const params::ParamSet& p,
                          const std::vector<params::StorageScheme>& schemes,
                          const SolveFn& solver, int workers = 0);
std::string rolling_csv(const RollingResult& r);

// Per-scheme sums over solved windows. Utilization is omitted: shares do not
// add across windows.
struct RollingTotals {
    std::string scheme;
    int windows_solved = 0;
    double nh3_total = 0;
    int startstop_count = 0;
    double grid_cost = 0;
    double capex_om = 0;
    double net_revenue = 0;
    double cum_temp_variation = 0;
};
std::vector<RollingTotals> rolling_totals(const RollingResult& r);

struct GenSpec {
    int steps = 48;
    double dt = 3600;        // s
    std::uint64_t seed = 1;
    double pv_peak = 1.0e8;  // W at solar noon
    double wind_mean = 8.0e7;   // W
    double wind_sigma = 2.5e7;  // W, stationary spread of the fluctuating part
    double wind_ar1 = 0.9;      // hour-to-hour correlation, in [0, 1)
    double ambient = 288.0;     // K
    std::vector<std::pair<int, int>> lulls;  // [begin, end) spans forced to zero
};

// Deterministic synthetic scenario: a diurnal solar arc plus autocorrelated
// wind, with optional exact-zero lull spans. The same spec yields the same
// series on every run; the generator draws its own normals so the stream does
// not depend on library internals.
params::ScenarioProfile gen_profile(const GenSpec& g);

}  // namespace p2a::harness
