#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "p2a/milp.hpp"
#include "p2a/params.hpp"
#include "p2a/sched.hpp"

namespace p2a::igdt {

// Search direction for the renewable uncertainty radius: robust widens the
// shortfall the plan can absorb while net revenue stays above a floor,
// opportunistic finds the smallest surplus that could reach a windfall target.
enum class Direction { robust, opportunistic };

// One callback serves both the bundled branch-and-bound and external solver
// processes; it receives a finished model and returns its solution.
using SolveFn = std::function<milp::Solution(const milp::MilpModel&)>;

struct IgdtResult {
    milp::SolveStatus status = milp::SolveStatus::infeasible;
    double alpha = 0;     // optimal radius, meaningful when status is optimal
    double baseline = 0;  // deterministic net revenue anchoring the target
    double floor = 0;     // net revenue requirement inside the embedded model
    sched::Schedule schedule;  // operating plan at the optimal radius
};

// Net revenue of the deterministic optimum; the anchor every target scales
// from. Throws SolveError when the scenario has no feasible plan at all.
double deterministic_baseline(const params::ScenarioProfile& s, const params::ParamSet& p,
                              const params::StorageScheme& scheme, const SolveFn& solver);

// Single-solve forms: the radius is a model variable, the revenue requirement
// a row, and the solver maximizes (robust) or minimizes (opportunistic) the
// radius directly.
IgdtResult solve_robust(const params::ScenarioProfile& s, const params::ParamSet& p,
                        const params::StorageScheme& scheme, double beta, const SolveFn& solver,
                        double alpha_max = 1.0);

IgdtResult solve_opportunistic(const params::ScenarioProfile& s, const params::ParamSet& p,
                               const params::StorageScheme& scheme, double beta,
                               const SolveFn& solver, double alpha_max = 1.0);

struct SweepPoint {
    double beta = 0;
    double alpha = 0;
    milp::SolveStatus status = milp::SolveStatus::infeasible;
};

// One anchor solve, then one embedded solve per concession level.
std::vector<SweepPoint> sweep(const params::ScenarioProfile& s, const params::ParamSet& p,
                              const params::StorageScheme& scheme, Direction dir,
                              const std::vector<double>& betas, const SolveFn& solver,
                              double alpha_max = 1.0);

std::string sweep_to_csv(const std::vector<SweepPoint>& pts);

// Reference implementation: re-solves the deterministic model at fixed scaled
// renewables with the temperature weight zeroed, and bisects on the radius.
// Exists to cross-check the embedded formulation; nullopt means no radius in
// [0, alpha_max] meets the target.
std::optional<double> bisect_alpha(const params::ScenarioProfile& s, const params::ParamSet& p,
                                   const params::StorageScheme& scheme, Direction dir, double beta,
                                   const SolveFn& solver, double tol_alpha = 1e-4,
                                   double alpha_max = 1.0);

}  // namespace p2a::igdt
