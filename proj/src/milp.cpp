#include "p2a/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <sstream>

namespace p2a::milp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lp_safe_name(const std::string& n) {
    if (n.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(n[0])) || n[0] == '_')) return false;
    for (char c : n)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

// Token-wrapping line builder for LP sections.
class LineWriter {
public:
    explicit LineWriter(std::ostringstream& out) : out_(out) {}
    void begin(const std::string& head) {
        line_ = " " + head;
    }
    void token(const std::string& t) {
        if (line_.size() + t.size() + 1 > 76) {
            out_ << line_ << "\n";
            line_ = "   ";
        }
        line_ += " " + t;
    }
    void end() {
        out_ << line_ << "\n";
        line_.clear();
    }

private:
    std::ostringstream& out_;
    std::string line_;
};

void emit_terms(LineWriter& w, const LinExpr& e, const MilpModel& m, bool with_constant) {
    const auto& ts = e.terms();
    if (ts.empty())
        w.token("+ 0 " + m.var_names.at(0));
    for (const auto& t : ts) {
        std::string tok = t.coeff < 0 ? "- " : "+ ";
        tok += fmt_double(std::abs(t.coeff));
        tok += " ";
        tok += m.var_names.at(static_cast<size_t>(t.var));
        w.token(tok);
    }
    if (with_constant && e.constant() != 0) {
        std::string tok = e.constant() < 0 ? "- " : "+ ";
        tok += fmt_double(std::abs(e.constant()));
        w.token(tok);
    }
}

}  // namespace

LinExpr& LinExpr::add(VarRef v, double coeff) {
    if (!v.valid()) throw Error(Error::Kind::internal, "expression uses an invalid variable");
    terms_.push_back(Term{v.id, coeff});
    normalized_ = false;
    return *this;
}

LinExpr& LinExpr::add(const LinExpr& other, double s) {
    for (const auto& t : other.terms_) terms_.push_back(Term{t.var, t.coeff * s});
    constant_ += other.constant_ * s;
    normalized_ = false;
    return *this;
}

LinExpr& LinExpr::scale(double s) {
    for (auto& t : terms_) t.coeff *= s;
    constant_ *= s;
    return *this;
}

const std::vector<Term>& LinExpr::terms() const {
    if (!normalized_) {
        std::sort(terms_.begin(), terms_.end(),
                  [](const Term& a, const Term& b) { return a.var < b.var; });
        std::vector<Term> merged;
        merged.reserve(terms_.size());
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().var == t.var)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(t);
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const Term& t) { return t.coeff == 0.0; }),
                     merged.end());
        terms_ = std::move(merged);
        normalized_ = true;
    }
    return terms_;
}

double LinExpr::eval(const std::vector<double>& x) const {
    double v = constant_;
    for (const auto& t : terms()) v += t.coeff * x.at(static_cast<size_t>(t.var));
    return v;
}

VarRef MilpModel::add_var(const std::string& name, VarType type, double lb, double ub) {
    if (!lp_safe_name(name))
        throw Error(Error::Kind::internal, "variable name not LP-safe: '" + name + "'");
    if (name_index_.count(name))
        throw Error(Error::Kind::internal, "duplicate variable name: '" + name + "'");
    if (!(lb <= ub))
        throw Error(Error::Kind::internal, "empty bound interval for '" + name + "'");
    if (type == VarType::binary) {
        if (lb != 0 && lb != 1)
            throw Error(Error::Kind::internal, "binary lower bound must be 0 or 1: " + name);
        if (ub != 0 && ub != 1)
            throw Error(Error::Kind::internal, "binary upper bound must be 0 or 1: " + name);
    }
    if (lb == -kInf)
        throw Error(Error::Kind::internal, "unbounded-below variables unsupported: " + name);
    int id = num_vars();
    var_names.push_back(name);
    var_types.push_back(type);
    lower.push_back(lb);
    upper.push_back(ub);
    name_index_[name] = id;
    return VarRef{id};
}

VarRef MilpModel::find_var(const std::string& name) const {
    auto it = name_index_.find(name);
    return it == name_index_.end() ? VarRef{} : VarRef{it->second};
}

void MilpModel::add_row(const std::string& name, LinExpr lhs, Sense sense, double rhs) {
    if (!lp_safe_name(name))
        throw Error(Error::Kind::internal, "row name not LP-safe: '" + name + "'");
    double c = lhs.constant();
    lhs.add_constant(-c);
    rows.push_back(Row{name, std::move(lhs), sense, rhs - c});
}

void MilpModel::fix_var(VarRef v, double value) {
    if (!v.valid()) throw Error(Error::Kind::internal, "fix_var on invalid ref");
    auto i = static_cast<size_t>(v.id);
    lower[i] = value;
    upper[i] = value;
}

int MilpModel::num_free_binaries() const {
    int n = 0;
    for (int i = 0; i < num_vars(); ++i)
        if (var_types[static_cast<size_t>(i)] == VarType::binary &&
            upper[static_cast<size_t>(i)] - lower[static_cast<size_t>(i)] > 0.5)
            ++n;
    return n;
}

const char* status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::limit: return "limit";
    }
    return "unknown";
}

std::string emit_lp(const MilpModel& m) {
    if (m.num_vars() == 0) throw Error(Error::Kind::internal, "cannot emit a model with no variables");
    std::ostringstream out;
    out << (m.maximize ? "Maximize\n" : "Minimize\n");
    LineWriter w(out);
    w.begin("obj:");
    emit_terms(w, m.objective, m, true);
    w.end();
    out << "Subject To\n";
    for (const auto& r : m.rows) {
        w.begin(r.name + ":");
        emit_terms(w, r.lhs, m, false);
        const char* op = r.sense == Sense::le ? "<=" : r.sense == Sense::ge ? ">=" : "=";
        w.token(op);
        w.token(fmt_double(r.rhs));
        w.end();
    }
    out << "Bounds\n";
    for (int i = 0; i < m.num_vars(); ++i) {
        auto idx = static_cast<size_t>(i);
        double lb = m.lower[idx], ub = m.upper[idx];
        const std::string& name = m.var_names[idx];
        if (lb == ub) {
            out << " " << name << " = " << fmt_double(lb) << "\n";
        } else if (ub == kInf) {
            out << " " << name << " >= " << fmt_double(lb) << "\n";
        } else {
            out << " " << fmt_double(lb) << " <= " << name << " <= " << fmt_double(ub) << "\n";
        }
    }
    bool any_bin = false;
    for (auto t : m.var_types) any_bin = any_bin || t == VarType::binary;
    if (any_bin) {
        out << "Binaries\n";
        w.begin("");
        for (int i = 0; i < m.num_vars(); ++i)
            if (m.var_types[static_cast<size_t>(i)] == VarType::binary)
                w.token(m.var_names[static_cast<size_t>(i)]);
        w.end();
    }
    out << "End\n";
    return out.str();
}

Solution parse_solution(const std::string& text, const MilpModel& m, const std::string& context) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::pair<std::string, std::string>> fields;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto sp = t.find_first_of(" \t");
        if (sp == std::string::npos)
            throw SolveError(SolveError::What::unparseable, context + ": bad line '" + t + "'");
        fields.emplace_back(t.substr(0, sp), trim(t.substr(sp)));
    }
    if (fields.empty() || fields[0].first != "status")
        throw SolveError(SolveError::What::unparseable, context + ": missing status line");
    Solution s;
    const std::string& st = fields[0].second;
    if (st == "optimal") s.status = SolveStatus::optimal;
    else if (st == "limit") s.status = SolveStatus::limit;
    else if (st == "infeasible") s.status = SolveStatus::infeasible;
    else if (st == "unbounded") s.status = SolveStatus::unbounded;
    else
        throw SolveError(SolveError::What::unparseable, context + ": unknown status '" + st + "'");
    if (s.status == SolveStatus::infeasible || s.status == SolveStatus::unbounded) return s;

    if (fields.size() < 2 || fields[1].first != "objective")
        throw SolveError(SolveError::What::unparseable, context + ": missing objective line");
    auto number = [&](const std::string& text, const std::string& where) {
        try {
            return parse_double(text, where);
        } catch (const SolveError&) {
            throw;
        } catch (const Error& e) {
            throw SolveError(SolveError::What::unparseable, e.what());
        }
    };
    s.objective = number(fields[1].second, context + ": objective");
    s.values.assign(static_cast<size_t>(m.num_vars()),
                    std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 2; i < fields.size(); ++i) {
        VarRef v = m.find_var(fields[i].first);
        if (!v.valid())
            throw SolveError(SolveError::What::unparseable,
                             context + ": unknown variable '" + fields[i].first + "'");
        auto idx = static_cast<size_t>(v.id);
        if (!std::isnan(s.values[idx]))
            throw SolveError(SolveError::What::unparseable,
                             context + ": duplicate variable '" + fields[i].first + "'");
        s.values[idx] = number(fields[i].second, context + ": " + fields[i].first);
    }
    for (int i = 0; i < m.num_vars(); ++i)
        if (std::isnan(s.values[static_cast<size_t>(i)]))
            throw SolveError(SolveError::What::unparseable,
                             context + ": no value for variable '" +
                                 m.var_names[static_cast<size_t>(i)] + "'");
    return s;
}

namespace {

struct ScratchDir {
    std::filesystem::path dir;
    bool keep = false;
    explicit ScratchDir(const char* tag) {
        std::string tmpl = (std::filesystem::temp_directory_path() /
                            (std::string("p2a_") + tag + "_XXXXXX"))
                               .string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw IoError("cannot create scratch directory " + tmpl);
        dir = buf.data();
        keep = std::getenv("P2A_KEEP_TMP") != nullptr;
    }
    ~ScratchDir() {
        if (!keep) {
            std::error_code ec;
            std::filesystem::remove_all(dir, ec);
        }
    }
};

std::string head_of_file(const std::string& path, size_t limit) {
    try {
        std::string text = read_file(path);
        if (text.size() > limit) text = text.substr(0, limit) + "...";
        return trim(text);
    } catch (const Error&) {
        return "";
    }
}

}  // namespace

Solution solve_external(const MilpModel& m, const std::string& command_template) {
    if (command_template.find("{lp}") == std::string::npos ||
        command_template.find("{sol}") == std::string::npos)
        throw ValidationError("solver", "command template needs {lp} and {sol} placeholders");
    ScratchDir scratch("milp");
    std::string lp_path = (scratch.dir / "model.lp").string();
    std::string sol_path = (scratch.dir / "model.sol").string();
    std::string err_path = (scratch.dir / "stderr.txt").string();
    write_file(lp_path, emit_lp(m));
    std::string cmd = replace_all(command_template, "{lp}", "'" + lp_path + "'");
    cmd = replace_all(cmd, "{sol}", "'" + sol_path + "'");
    cmd += " > '" + (scratch.dir / "stdout.txt").string() + "' 2> '" + err_path + "'";
    int rc = std::system(cmd.c_str());
    if (rc != 0) {
        std::string err = head_of_file(err_path, 600);
        throw SolveError(SolveError::What::process,
                         "solver command failed (exit " + std::to_string(rc) + "): " + err);
    }
    std::string text;
    try {
        text = read_file(sol_path);
    } catch (const Error&) {
        throw SolveError(SolveError::What::process,
                         "solver produced no solution file: " + head_of_file(err_path, 600));
    }
    return parse_solution(text, m, "external solver");
}

Solution solve(const MilpModel& m, const SolverSpec& spec, const params::SolverTolerances& tol) {
    if (spec.use_tiny) return solve_tiny(m, tol);
    if (spec.command.empty())
        throw ValidationError("solver", "no solver command configured");
    return solve_external(m, spec.command);
}

ResidualReport check_feasible(const MilpModel& m, const std::vector<double>& x, double tol) {
    if (x.size() != static_cast<size_t>(m.num_vars()))
        throw Error(Error::Kind::internal, "value vector size mismatch in check_feasible");
    ResidualReport rep;
    auto note = [&](double violation, const std::string& name) {
        if (violation > tol) ++rep.violation_count;
        if (violation > rep.worst_violation) {
            rep.worst_violation = violation;
            rep.worst_name = name;
        }
    };
    for (const auto& r : m.rows) {
        double v = r.lhs.eval(x);
        double viol = 0;
        if (r.sense == Sense::le) viol = v - r.rhs;
        else if (r.sense == Sense::ge) viol = r.rhs - v;
        else viol = std::abs(v - r.rhs);
        note(std::max(0.0, viol), r.name);
    }
    for (int i = 0; i < m.num_vars(); ++i) {
        auto idx = static_cast<size_t>(i);
        note(m.lower[idx] - x[idx], m.var_names[idx] + ":lb");
        if (m.upper[idx] < kInf) note(x[idx] - m.upper[idx], m.var_names[idx] + ":ub");
        if (m.var_types[idx] == VarType::binary)
            note(std::abs(x[idx] - std::round(x[idx])), m.var_names[idx] + ":int");
    }
    rep.feasible = rep.violation_count == 0;
    return rep;
}

}  // namespace p2a::milp
