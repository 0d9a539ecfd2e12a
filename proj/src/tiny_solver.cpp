#include <cmath>
#include <functional>
#include <limits>

#include "p2a/milp.hpp"

// Exact branch and bound over the binary variables: interval propagation
// prunes and forces binaries, the LP relaxation bounds the subtree, branching
// follows the first fractional binary (round-nearest child first). Intended
// for oracle duty on instances with at most a few dozen binaries.

namespace p2a::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Forces binaries implied by interval arithmetic on each row.
// Returns false when some row cannot be satisfied within the current bounds.
bool propagate(const MilpModel& m, std::vector<double>& lb, std::vector<double>& ub, double ft) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& row : m.rows) {
            const auto& ts = row.lhs.terms();
            double lo = 0, hi = 0, mag = 1.0;
            for (const auto& t : ts) {
                auto vi = static_cast<size_t>(t.var);
                if (t.coeff > 0) {
                    lo += t.coeff * lb[vi];
                    hi += t.coeff * ub[vi];
                } else {
                    lo += t.coeff * ub[vi];
                    hi += t.coeff * lb[vi];
                }
                mag = std::max({mag, std::abs(t.coeff * lb[vi]), std::abs(t.coeff * ub[vi])});
            }
            // Interval endpoints inherit the row's magnitude, so the slack
            // tolerance has to as well.
            double ftr = ft * mag;
            bool need_le = row.sense != Sense::ge;  // lhs <= rhs applies
            bool need_ge = row.sense != Sense::le;  // lhs >= rhs applies
            if (need_le && lo > row.rhs + ftr) return false;
            if (need_ge && hi < row.rhs - ftr) return false;
            for (const auto& t : ts) {
                auto vi = static_cast<size_t>(t.var);
                if (m.var_types[vi] != VarType::binary || ub[vi] - lb[vi] < 0.5) continue;
                // contribution intervals at b=0 and b=1
                double lo0 = lo - std::min(t.coeff, 0.0);
                double hi0 = hi - std::max(t.coeff, 0.0);
                double lo1 = lo0 + t.coeff;
                double hi1 = hi0 + t.coeff;
                bool can0 = !(need_le && lo0 > row.rhs + ftr) && !(need_ge && hi0 < row.rhs - ftr);
                bool can1 = !(need_le && lo1 > row.rhs + ftr) && !(need_ge && hi1 < row.rhs - ftr);
                if (!can0 && !can1) return false;
                if (can0 == can1) continue;
                double v = can1 ? 1.0 : 0.0;
                lb[vi] = v;
                ub[vi] = v;
                changed = true;
                // refresh the row interval with the new fixing
                lo = v ? lo1 : lo0;
                hi = v ? hi1 : hi0;
            }
        }
    }
    return true;
}

}  // namespace

Solution solve_tiny(const MilpModel& m, const params::SolverTolerances& tol,
                    int max_free_binaries) {
    int free0 = m.num_free_binaries();
    if (free0 > max_free_binaries)
        throw SolveError(SolveError::What::limit,
                         "bundled solver limited to " + std::to_string(max_free_binaries) +
                             " free binaries, model has " + std::to_string(free0));
    for (int i = 0; i < m.num_vars(); ++i)
        if (m.upper[static_cast<size_t>(i)] == kInf &&
            m.var_types[static_cast<size_t>(i)] == VarType::binary)
            throw Error(Error::Kind::internal, "binary without upper bound");

    double sgn = m.maximize ? 1.0 : -1.0;
    Solution best;
    best.status = SolveStatus::infeasible;
    bool have_best = false;
    bool unbounded = false;

    std::vector<double> lb = m.lower, ub = m.upper;

    std::function<void(std::vector<double>&, std::vector<double>&)> go =
        [&](std::vector<double>& L, std::vector<double>& U) {
            if (unbounded) return;
            if (!propagate(m, L, U, tol.feasibility)) return;
            Solution rel = solve_lp_relaxation(m, tol, L, U);
            if (rel.status == SolveStatus::infeasible) return;
            bool is_unbounded = rel.status == SolveStatus::unbounded;
            if (!is_unbounded && have_best &&
                sgn * rel.objective <= sgn * best.objective +
                                           1e-9 * (1 + std::abs(best.objective)))
                return;  // the relaxation bound cannot beat the incumbent
            int branch = -1;
            for (int i = 0; i < m.num_vars(); ++i) {
                auto vi = static_cast<size_t>(i);
                if (m.var_types[vi] != VarType::binary || U[vi] - L[vi] < 0.5) continue;
                if (is_unbounded ||
                    std::abs(rel.values[vi] - std::round(rel.values[vi])) > tol.integrality) {
                    branch = i;
                    break;
                }
            }
            if (branch < 0) {
                if (is_unbounded) {
                    // no free binaries left: a feasible ray exists
                    unbounded = true;
                    return;
                }
                for (int i = 0; i < m.num_vars(); ++i) {
                    auto vi = static_cast<size_t>(i);
                    if (m.var_types[vi] == VarType::binary)
                        rel.values[vi] = std::round(rel.values[vi]);
                }
                rel.objective = m.objective.eval(rel.values);
                if (!have_best || sgn * rel.objective > sgn * best.objective) {
                    best = rel;
                    have_best = true;
                }
                return;
            }
            auto bi = static_cast<size_t>(branch);
            double first = is_unbounded ? 0.0 : std::round(rel.values[bi]);
            for (double v : {first, 1.0 - first}) {
                std::vector<double> L2 = L, U2 = U;
                L2[bi] = v;
                U2[bi] = v;
                go(L2, U2);
                if (unbounded) return;
            }
        };
    go(lb, ub);

    if (unbounded) return Solution{SolveStatus::unbounded, 0, {}};
    if (!have_best) return Solution{SolveStatus::infeasible, 0, {}};
    best.status = SolveStatus::optimal;
    return best;
}

}  // namespace p2a::milp
