#pragma once

#include <map>
#include <string>
#include <vector>

#include "p2a/params.hpp"
#include "p2a/util.hpp"

// Solver-neutral mixed-integer linear program representation, an LP-format
// writer, a solution-file reader, an external-process solve path, and a small
// exact branch-and-bound solver used for oracle tests and tiny instances.

namespace p2a::milp {

enum class VarType { continuous, binary };
enum class Sense { le, ge, eq };
enum class SolveStatus { optimal, infeasible, unbounded, limit };

struct VarRef {
    int id = -1;
    bool valid() const { return id >= 0; }
};

struct Term {
    int var;
    double coeff;
};

class LinExpr {
public:
    LinExpr() = default;
    explicit LinExpr(double constant) : constant_(constant) {}
    LinExpr(VarRef v) { add(v, 1.0); }

    LinExpr& add(VarRef v, double coeff);
    LinExpr& add(const LinExpr& other, double scale = 1.0);
    LinExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }
    LinExpr& scale(double s);

    double constant() const { return constant_; }
    // Terms merged by variable id, zero coefficients dropped, sorted by id.
    const std::vector<Term>& terms() const;
    double eval(const std::vector<double>& x) const;

private:
    mutable std::vector<Term> terms_;
    mutable bool normalized_ = true;
    double constant_ = 0;
};

struct Row {
    std::string name;
    LinExpr lhs;  // constant already folded into rhs
    Sense sense;
    double rhs;
};

struct MilpModel {
    bool maximize = true;
    LinExpr objective;
    std::vector<std::string> var_names;
    std::vector<VarType> var_types;
    std::vector<double> lower, upper;
    std::vector<Row> rows;

    VarRef add_var(const std::string& name, VarType type, double lb, double ub);
    VarRef find_var(const std::string& name) const;  // invalid ref when absent
    void add_row(const std::string& name, LinExpr lhs, Sense sense, double rhs);
    void fix_var(VarRef v, double value);
    int num_vars() const { return static_cast<int>(var_names.size()); }
    int num_free_binaries() const;

private:
    std::map<std::string, int> name_index_;
};

struct Solution {
    SolveStatus status = SolveStatus::infeasible;
    double objective = 0;
    std::vector<double> values;  // by variable id; empty unless optimal/limit
};

const char* status_name(SolveStatus s);

// Deterministic LP-format text (the documented subset: objective, rows,
// bounds, binaries). Coefficients are written with round-trip precision.
std::string emit_lp(const MilpModel& m);

// Reads the adapter solution format: `status <word>`, `objective <num>`,
// then one `<name> <value>` line per variable.
Solution parse_solution(const std::string& text, const MilpModel& m, const std::string& context);

// Writes the LP to a scratch directory, runs the command template with {lp}
// and {sol} substituted, and reads the solution back. Nonzero exit, a missing
// solution file, or unparseable output raise SolveError.
Solution solve_external(const MilpModel& m, const std::string& command_template);

// Exact branch and bound over the binary variables with interval propagation
// and LP-relaxation bounding. Refuses models with more than max_free_binaries
// unfixed binaries.
Solution solve_tiny(const MilpModel& m, const params::SolverTolerances& tol,
                    int max_free_binaries = 20);

// Dense two-phase simplex on the model with every variable treated as
// continuous inside its bounds.
Solution solve_lp_relaxation(const MilpModel& m, const params::SolverTolerances& tol);
// Same, but with the bound vectors overridden (used by the branch and bound).
Solution solve_lp_relaxation(const MilpModel& m, const params::SolverTolerances& tol,
                             const std::vector<double>& lower,
                             const std::vector<double>& upper);

struct SolverSpec {
    bool use_tiny = false;
    std::string command;  // template with {lp} and {sol}; required unless use_tiny
};

Solution solve(const MilpModel& m, const SolverSpec& spec, const params::SolverTolerances& tol);

struct ResidualReport {
    bool feasible = true;
    int violation_count = 0;
    double worst_violation = 0;
    std::string worst_name;
};

// Residual check of a candidate point against rows, bounds, and integrality.
ResidualReport check_feasible(const MilpModel& m, const std::vector<double>& x, double tol);

}  // namespace p2a::milp
