#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "p2a/igdt.hpp"
#include "p2a/util.hpp"

namespace p2a::igdt {

namespace {

void check_inputs(double beta, double alpha_max) {
    if (!std::isfinite(beta) || beta < 0)
        throw ValidationError("beta", "must be finite and non-negative");
    if (!std::isfinite(alpha_max) || alpha_max <= 0)
        throw ValidationError("alpha_max", "must be finite and positive");
}

IgdtResult embedded_solve(const params::ScenarioProfile& s, const params::ParamSet& p,
                          const params::StorageScheme& scheme, Direction dir, double beta,
                          double baseline, const SolveFn& solver, double alpha_max) {
    sched::BuildOptions o;
    o.embed = dir == Direction::robust ? sched::Embed::robust : sched::Embed::opportunistic;
    o.beta = beta;
    o.baseline_revenue = baseline;
    o.alpha_max = alpha_max;
    auto b = sched::build_full_model(s, p, scheme, o);
    auto sol = solver(b.model);

    IgdtResult r;
    r.status = sol.status;
    r.baseline = baseline;
    r.floor = (dir == Direction::robust ? 1.0 - beta : 1.0 + beta) * baseline;
    if (sol.status == milp::SolveStatus::optimal) {
        r.alpha = sol.objective;
        r.schedule = sched::decode(b, sol);
    }
    return r;
}

}  // namespace

double deterministic_baseline(const params::ScenarioProfile& s, const params::ParamSet& p,
                              const params::StorageScheme& scheme, const SolveFn& solver) {
    auto b = sched::build_full_model(s, p, scheme);
    auto sol = solver(b.model);
    if (sol.status != milp::SolveStatus::optimal)
        throw SolveError(SolveError::What::internal,
                         std::string("anchor solve ended ") + milp::status_name(sol.status) +
                             "; the scenario has no deterministic optimum to scale targets from");
    return sched::decode(b, sol).breakdown.net_revenue;
}

IgdtResult solve_robust(const params::ScenarioProfile& s, const params::ParamSet& p,
                        const params::StorageScheme& scheme, double beta, const SolveFn& solver,
                        double alpha_max) {
    check_inputs(beta, alpha_max);
    double base = deterministic_baseline(s, p, scheme, solver);
    return embedded_solve(s, p, scheme, Direction::robust, beta, base, solver, alpha_max);
}

IgdtResult solve_opportunistic(const params::ScenarioProfile& s, const params::ParamSet& p,
                               const params::StorageScheme& scheme, double beta,
                               const SolveFn& solver, double alpha_max) {
    check_inputs(beta, alpha_max);
    double base = deterministic_baseline(s, p, scheme, solver);
    return embedded_solve(s, p, scheme, Direction::opportunistic, beta, base, solver, alpha_max);
}

std::vector<SweepPoint> sweep(const params::ScenarioProfile& s, const params::ParamSet& p,
                              const params::StorageScheme& scheme, Direction dir,
                              const std::vector<double>& betas, const SolveFn& solver,
                              double alpha_max) {
    for (double beta : betas) check_inputs(beta, alpha_max);
    double base = deterministic_baseline(s, p, scheme, solver);
    std::vector<SweepPoint> pts;
    pts.reserve(betas.size());
    for (double beta : betas) {
        auto r = embedded_solve(s, p, scheme, dir, beta, base, solver, alpha_max);
        pts.push_back({beta, r.alpha, r.status});
    }
    return pts;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& pts) {
    std::string out = "beta,alpha,status\n";
    for (const auto& pt : pts) {
        out += fmt_double(pt.beta);
        out += ',';
        out += fmt_double(pt.alpha);
        out += ',';
        out += milp::status_name(pt.status);
        out += '\n';
    }
    return out;
}

std::optional<double> bisect_alpha(const params::ScenarioProfile& s, const params::ParamSet& p,
                                   const params::StorageScheme& scheme, Direction dir, double beta,
                                   const SolveFn& solver, double tol_alpha, double alpha_max) {
    check_inputs(beta, alpha_max);
    if (!std::isfinite(tol_alpha) || tol_alpha <= 0)
        throw ValidationError("tol_alpha", "must be finite and positive");

    double base = deterministic_baseline(s, p, scheme, solver);
    double floor = (dir == Direction::robust ? 1.0 - beta : 1.0 + beta) * base;
    double slack = 1e-9 * std::max(1.0, std::abs(floor));

    // The target tracks revenue alone, so the re-solves drop the temperature
    // term from the objective (the hard temperature bounds still apply).
    params::ParamSet q = p;
    q.econ.weight_temp = 0;
    q.econ.weight_profit = 1;

    auto meets = [&](double a) {
        sched::BuildOptions o;
        o.res_scale = dir == Direction::robust ? 1.0 - a : 1.0 + a;
        auto b = sched::build_full_model(s, q, scheme, o);
        auto sol = solver(b.model);
        if (sol.status != milp::SolveStatus::optimal) return false;
        return sched::decode(b, sol).breakdown.net_revenue >= floor - slack;
    };

    // Renewables cannot shrink below zero, so the robust radius caps at one.
    double amax = dir == Direction::robust ? std::min(alpha_max, 1.0) : alpha_max;

    if (dir == Direction::robust) {
        if (!meets(0.0)) return std::nullopt;
        if (meets(amax)) return amax;
        double lo = 0.0, hi = amax;  // lo meets the floor, hi does not
        while (hi - lo > tol_alpha) {
            double mid = 0.5 * (lo + hi);
            (meets(mid) ? lo : hi) = mid;
        }
        return lo;
    }
    if (meets(0.0)) return 0.0;
    if (!meets(amax)) return std::nullopt;
    double lo = 0.0, hi = amax;  // hi meets the target, lo does not
    while (hi - lo > tol_alpha) {
        double mid = 0.5 * (lo + hi);
        (meets(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace p2a::igdt
