#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "p2a/milp.hpp"

// Dense two-phase primal simplex with Bland's rule. Lower bounds are shifted
// out and each column is range-scaled to [0, 1] so tolerances mean the same
// thing for a battery level in watt-hours and a load fraction; finite upper
// bounds become explicit rows, rows are equilibrated by their largest
// coefficient. Sized for the small instances the bundled branch-and-bound
// explores, not for production-scale LPs.

namespace p2a::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;

struct Tableau {
    int m = 0;                           // rows
    int n = 0;                           // columns excluding rhs
    std::vector<std::vector<double>> a;  // m x (n+1), last column is rhs
    std::vector<int> basis;              // basic column per row
    std::vector<double> cost;            // reduced costs, length n
    double val = 0;                      // objective value of the current basis

    void pivot(int r, int e) {
        double p = a[static_cast<size_t>(r)][static_cast<size_t>(e)];
        auto& row = a[static_cast<size_t>(r)];
        for (double& v : row) v /= p;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            double f = a[static_cast<size_t>(i)][static_cast<size_t>(e)];
            if (f == 0) continue;
            auto& ri = a[static_cast<size_t>(i)];
            for (int j = 0; j <= n; ++j) ri[static_cast<size_t>(j)] -= f * row[static_cast<size_t>(j)];
        }
        double f = cost[static_cast<size_t>(e)];
        if (f != 0) {
            for (int j = 0; j < n; ++j) cost[static_cast<size_t>(j)] -= f * row[static_cast<size_t>(j)];
            val += f * row[static_cast<size_t>(n)];
        }
        basis[static_cast<size_t>(r)] = e;
    }

    // 0 = optimal, 1 = unbounded
    int iterate(const std::vector<bool>& allowed) {
        for (;;) {
            int e = -1;
            for (int j = 0; j < n; ++j) {
                if (allowed[static_cast<size_t>(j)] && cost[static_cast<size_t>(j)] > kPivotTol) {
                    e = j;  // Bland: smallest improving index
                    break;
                }
            }
            if (e < 0) return 0;
            int leave = -1;
            double best = 0;
            for (int i = 0; i < m; ++i) {
                double aie = a[static_cast<size_t>(i)][static_cast<size_t>(e)];
                if (aie <= kPivotTol) continue;
                double ratio = a[static_cast<size_t>(i)][static_cast<size_t>(n)] / aie;
                if (leave < 0 || ratio < best - 1e-12 ||
                    (ratio <= best + 1e-12 &&
                     basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)]))
                {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave < 0) return 1;
            pivot(leave, e);
        }
    }
};

}  // namespace

Solution solve_lp_relaxation(const MilpModel& m, const params::SolverTolerances& tol) {
    return solve_lp_relaxation(m, tol, m.lower, m.upper);
}

Solution solve_lp_relaxation(const MilpModel& m, const params::SolverTolerances& tol,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper) {
    int nv = m.num_vars();
    if (lower.size() != static_cast<size_t>(nv) || upper.size() != static_cast<size_t>(nv))
        throw Error(Error::Kind::internal, "bound vector size mismatch");

    // Free columns get shifted coordinates y = x - lb; fixed variables are
    // substituted into the rows.
    std::vector<int> col_of(static_cast<size_t>(nv), -1);
    std::vector<int> var_of;
    for (int i = 0; i < nv; ++i) {
        auto idx = static_cast<size_t>(i);
        if (lower[idx] == -kInf)
            throw Error(Error::Kind::internal, "unbounded-below variable in LP");
        if (upper[idx] - lower[idx] > 0) {
            col_of[idx] = static_cast<int>(var_of.size());
            var_of.push_back(i);
        }
    }
    int k = static_cast<int>(var_of.size());

    std::vector<double> cscale(static_cast<size_t>(k), 1.0);
    for (int j = 0; j < k; ++j) {
        auto vi = static_cast<size_t>(var_of[static_cast<size_t>(j)]);
        cscale[static_cast<size_t>(j)] = upper[vi] < kInf
                                             ? upper[vi] - lower[vi]
                                             : std::max(1.0, std::abs(lower[vi]));
    }

    struct BuildRow {
        std::vector<double> coeffs;  // length k
        Sense sense;
        double rhs;
    };
    std::vector<BuildRow> rows;
    auto add_build_row = [&](const LinExpr& lhs, Sense sense, double rhs) {
        BuildRow r;
        r.coeffs.assign(static_cast<size_t>(k), 0.0);
        r.sense = sense;
        r.rhs = rhs;
        double scale_max = 0;
        for (const auto& t : lhs.terms()) {
            auto vi = static_cast<size_t>(t.var);
            r.rhs -= t.coeff * lower[vi];  // shift or substitute
            if (col_of[vi] >= 0)
                r.coeffs[static_cast<size_t>(col_of[vi])] +=
                    t.coeff * cscale[static_cast<size_t>(col_of[vi])];
        }
        for (double c : r.coeffs) scale_max = std::max(scale_max, std::abs(c));
        if (scale_max == 0) {
            // all variables substituted; verify the residual constraint
            bool ok = r.sense == Sense::le   ? 0 <= r.rhs + tol.feasibility
                      : r.sense == Sense::ge ? 0 >= r.rhs - tol.feasibility
                                             : std::abs(r.rhs) <= tol.feasibility;
            if (!ok) rows.push_back(std::move(r));  // keep: forces phase-1 infeasibility
            return;
        }
        double s = 1.0 / scale_max;
        for (double& c : r.coeffs) c *= s;
        r.rhs *= s;
        rows.push_back(std::move(r));
    };

    for (const auto& row : m.rows) add_build_row(row.lhs, row.sense, row.rhs);
    for (int j = 0; j < k; ++j) {
        auto vi = static_cast<size_t>(var_of[static_cast<size_t>(j)]);
        if (upper[vi] < kInf) {
            LinExpr e;
            e.add(VarRef{var_of[static_cast<size_t>(j)]}, 1.0);
            add_build_row(e, Sense::le, upper[vi]);
        }
    }

    // An all-fixed, row-consistent model needs no simplex.
    auto finish = [&](const std::vector<double>& y) {
        Solution s;
        s.status = SolveStatus::optimal;
        s.values.assign(static_cast<size_t>(nv), 0.0);
        for (int i = 0; i < nv; ++i) s.values[static_cast<size_t>(i)] = lower[static_cast<size_t>(i)];
        for (int j = 0; j < k; ++j)
            s.values[static_cast<size_t>(var_of[static_cast<size_t>(j)])] +=
                y[static_cast<size_t>(j)] * cscale[static_cast<size_t>(j)];
        s.objective = m.objective.eval(s.values);
        return s;
    };

    // Internal sense: maximize, with the cost vector normalized so the
    // optimality test is scale-free.
    std::vector<double> cmax(static_cast<size_t>(k), 0.0);
    for (const auto& t : m.objective.terms()) {
        auto vi = static_cast<size_t>(t.var);
        if (col_of[vi] >= 0)
            cmax[static_cast<size_t>(col_of[vi])] += (m.maximize ? 1.0 : -1.0) * t.coeff *
                                                     cscale[static_cast<size_t>(col_of[vi])];
    }
    double cnorm = 0;
    for (double c : cmax) cnorm = std::max(cnorm, std::abs(c));
    if (cnorm > 0)
        for (double& c : cmax) c /= cnorm;

    // Orient every row to a non-negative rhs, then attach slack/artificials.
    int n_le = 0, n_art = 0;
    for (auto& r : rows) {
        if (r.rhs < 0) {
            for (double& c : r.coeffs) c = -c;
            r.rhs = -r.rhs;
            if (r.sense == Sense::le) r.sense = Sense::ge;
            else if (r.sense == Sense::ge) r.sense = Sense::le;
        }
        if (r.sense != Sense::eq) ++n_le;  // slack or surplus column
        if (r.sense != Sense::le) ++n_art;
    }

    Tableau t;
    t.m = static_cast<int>(rows.size());
    t.n = k + n_le + n_art;
    t.a.assign(static_cast<size_t>(t.m), std::vector<double>(static_cast<size_t>(t.n) + 1, 0.0));
    t.basis.assign(static_cast<size_t>(t.m), -1);
    int next_slack = k;
    int next_art = k + n_le;
    int first_art = next_art;
    for (int i = 0; i < t.m; ++i) {
        auto& row = t.a[static_cast<size_t>(i)];
        const auto& r = rows[static_cast<size_t>(i)];
        for (int j = 0; j < k; ++j) row[static_cast<size_t>(j)] = r.coeffs[static_cast<size_t>(j)];
        row[static_cast<size_t>(t.n)] = r.rhs;
        if (r.sense == Sense::le) {
            row[static_cast<size_t>(next_slack)] = 1.0;
            t.basis[static_cast<size_t>(i)] = next_slack++;
        } else if (r.sense == Sense::ge) {
            row[static_cast<size_t>(next_slack++)] = -1.0;
            row[static_cast<size_t>(next_art)] = 1.0;
            t.basis[static_cast<size_t>(i)] = next_art++;
        } else {
            row[static_cast<size_t>(next_art)] = 1.0;
            t.basis[static_cast<size_t>(i)] = next_art++;
        }
    }

    std::vector<bool> allow_all(static_cast<size_t>(t.n), true);

    if (n_art > 0) {
        // Phase 1: maximize minus the artificial sum.
        t.cost.assign(static_cast<size_t>(t.n), 0.0);
        t.val = 0;
        for (int i = 0; i < t.m; ++i) {
            if (t.basis[static_cast<size_t>(i)] < first_art) continue;
            const auto& row = t.a[static_cast<size_t>(i)];
            for (int j = 0; j < t.n; ++j) t.cost[static_cast<size_t>(j)] += row[static_cast<size_t>(j)];
            t.val -= row[static_cast<size_t>(t.n)];
        }
        for (int j = first_art; j < t.n; ++j) t.cost[static_cast<size_t>(j)] -= 1.0;
        double deficit = -t.val;  // sum of artificial levels at the start
        t.iterate(allow_all);     // cannot be unbounded: objective capped at 0
        if (t.val < -1e-7 * std::max(1.0, deficit))
            return Solution{SolveStatus::infeasible, 0, {}};
        // Remove lingering zero-level artificials from the basis.
        for (int i = 0; i < t.m; ++i) {
            if (t.basis[static_cast<size_t>(i)] < first_art) continue;
            int enter = -1;
            for (int j = 0; j < first_art; ++j)
                if (std::abs(t.a[static_cast<size_t>(i)][static_cast<size_t>(j)]) > 1e-7) {
                    enter = j;
                    break;
                }
            if (enter >= 0) {
                t.pivot(i, enter);
            } else {
                // redundant row: drop it
                t.a.erase(t.a.begin() + i);
                t.basis.erase(t.basis.begin() + i);
                --t.m;
                --i;
            }
        }
    }

    // Phase 2 with the true costs.
    std::vector<bool> allowed(static_cast<size_t>(t.n), true);
    for (int j = first_art; j < t.n; ++j) allowed[static_cast<size_t>(j)] = false;
    t.cost.assign(static_cast<size_t>(t.n), 0.0);
    for (int j = 0; j < k; ++j) t.cost[static_cast<size_t>(j)] = cmax[static_cast<size_t>(j)];
    t.val = 0;
    for (int i = 0; i < t.m; ++i) {
        int b = t.basis[static_cast<size_t>(i)];
        double cb = b < k ? cmax[static_cast<size_t>(b)] : 0.0;
        if (cb == 0) continue;
        const auto& row = t.a[static_cast<size_t>(i)];
        for (int j = 0; j < t.n; ++j) t.cost[static_cast<size_t>(j)] -= cb * row[static_cast<size_t>(j)];
        t.val += cb * row[static_cast<size_t>(t.n)];
    }
    if (t.iterate(allowed) == 1)
        return Solution{SolveStatus::unbounded, 0, {}};

    std::vector<double> y(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < t.m; ++i) {
        int b = t.basis[static_cast<size_t>(i)];
        if (b < k) y[static_cast<size_t>(b)] = t.a[static_cast<size_t>(i)][static_cast<size_t>(t.n)];
    }
    for (double& v : y) v = std::max(0.0, v);  // clip simplex dust
    return finish(y);
}

}  // namespace p2a::milp
