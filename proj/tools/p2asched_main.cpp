// Batch front end: loads configs and scenarios, drives the solver through the
// C interface, and leaves machine-readable results in an output directory.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "p2asched.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliError {
    int code;  // process exit code
    std::string category;
    std::string message;
};

[[noreturn]] void bail(int code, const std::string& category, const std::string& message) {
    throw CliError{code, category, message};
}

int exit_for(p2a_status st) {
    switch (st) {
        case P2A_OK: return 0;
        case P2A_ESOLVE:
        case P2A_EINTERNAL: return 1;
        default: return 2;
    }
}

const char* category_for(p2a_status st) {
    switch (st) {
        case P2A_OK: return "ok";
        case P2A_EINVAL: return "invalid";
        case P2A_EVALID: return "validation";
        case P2A_EPARSE: return "parse";
        case P2A_EIO: return "io";
        case P2A_ESOLVE: return "solve";
        default: return "internal";
    }
}

void require_ok(p2a_status st) {
    if (st != P2A_OK) bail(exit_for(st), category_for(st), p2a_last_error());
}

std::string one_line(std::string s) {
    for (auto& c : s)
        if (c == '\n' || c == '\r') c = ';';
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) bail(2, "io", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) bail(2, "io", "cannot write " + path.string());
    out << text;
    if (!out.flush()) bail(2, "io", "short write to " + path.string());
}

std::string fnv1a64_hex(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const char* solve_status_name(int st) {
    switch (st) {
        case P2A_SOLVE_OPTIMAL: return "optimal";
        case P2A_SOLVE_INFEASIBLE: return "infeasible";
        case P2A_SOLVE_UNBOUNDED: return "unbounded";
        case P2A_SOLVE_LIMIT: return "limit";
        default: return "unknown";
    }
}

// RAII wrappers over the C handles.
struct Params {
    p2a_params* h = nullptr;
    ~Params() { p2a_params_free(h); }
};
struct Scenario {
    p2a_scenario* h = nullptr;
    ~Scenario() { p2a_scenario_free(h); }
};
struct ScheduleH {
    p2a_schedule* h = nullptr;
    ~ScheduleH() { p2a_schedule_free(h); }
};
struct CStr {
    char* s = nullptr;
    ~CStr() { p2a_string_free(s); }
    std::string str() const { return s ? s : ""; }
};

// Common flags and derived state shared by the scenario-driven subcommands.
struct RunCtx {
    std::string scenario_path, sidecar_path, config_path, scheme, solver_flag, out_dir = "out";
    bool tiny = false;
    bool check = false;
    int horizon = 0;
    double dt = 0;

    std::string command;
    std::map<std::string, std::string> flags;
    std::vector<std::pair<std::string, std::string>> inputs;  // label -> path
    std::vector<fs::path> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    std::string solver() const {
        if (tiny) return "tiny";
        if (!solver_flag.empty()) return solver_flag;
        if (const char* env = std::getenv("P2A_SOLVER"); env && *env) return env;
        return "tiny";
    }

    std::string sidecar() const {
        if (!sidecar_path.empty()) return sidecar_path;
        fs::path p(scenario_path);
        p.replace_extension(".cfg");
        return p.string();
    }

    void load_params(Params& p) {
        require_ok(config_path.empty() ? p2a_params_create(&p.h)
                                       : p2a_params_load(config_path.c_str(), &p.h));
        if (!config_path.empty()) inputs.emplace_back("config", config_path);
    }

    void load_scenario(Scenario& s) {
        require_ok(p2a_scenario_load(scenario_path.c_str(), sidecar().c_str(), &s.h));
        inputs.emplace_back("scenario", scenario_path);
        inputs.emplace_back("sidecar", sidecar());
        if (horizon > 0) {
            require_ok(p2a_scenario_truncate(s.h, horizon));
            flags["horizon"] = std::to_string(horizon);
        }
        if (dt > 0) {
            require_ok(p2a_scenario_set_dt(s.h, dt));
            flags["dt"] = std::to_string(dt);
        }
    }

    fs::path out(const std::string& name) {
        fs::create_directories(out_dir);
        fs::path p = fs::path(out_dir) / name;
        outputs.push_back(p);
        return p;
    }

    void write_manifest(const std::string& solve_status) {
        json inputs_j = json::object();
        for (const auto& [label, path] : inputs) {
            json rec;
            rec["path"] = path;
            std::ifstream probe(path, std::ios::binary);
            if (probe) {
                std::ostringstream buf;
                buf << probe.rdbuf();
                rec["fnv1a64"] = fnv1a64_hex(buf.str());
            } else {
                rec["fnv1a64"] = "absent";
            }
            inputs_j[label] = rec;
        }
        json files = json::array();
        for (const auto& p : outputs)
            if (p.filename() != "manifest.json") files.push_back(p.filename().string());

        double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        json m;
        m["command"] = command;
        m["version"] = p2a_version();
        m["inputs"] = inputs_j;
        m["flags"] = flags;
        m["solver_command"] = solver();
        m["solve_status"] = solve_status;
        m["wall_time_s"] = wall;
        m["outputs"] = files;
        write_file(out("manifest.json"), m.dump(2) + "\n");
    }

    // Re-reads everything this run wrote and validates the formats.
    void self_check() {
        if (!check) return;
        for (const auto& p : outputs) {
            std::string text = read_file(p.string());
            if (p.extension() == ".json") {
                auto parsed = json::parse(text, nullptr, false);
                if (parsed.is_discarded()) bail(1, "selfcheck", "invalid json in " + p.string());
            } else if (p.filename() == "schedule.csv") {
                p2a_schedule* sch = nullptr;
                if (p2a_schedule_from_csv(text.c_str(), &sch) != P2A_OK)
                    bail(1, "selfcheck", "unreadable schedule in " + p.string());
                p2a_schedule_free(sch);
            } else if (text.empty() || text.find('\n') == std::string::npos) {
                bail(1, "selfcheck", "empty table in " + p.string());
            }
        }
        std::cout << "self-check ok: " << outputs.size() << " files\n";
    }
};

std::string metrics_header() {
    return "nh3_total_t,startstop_count,grid_cost_CNY,capex_om_CNY,net_revenue_CNY,"
           "cum_temp_variation_K,renewable_utilization";
}

std::string metrics_row(const p2a_metrics& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.nh3_total << ',' << m.startstop_count << ',' << m.grid_cost << ',' << m.capex_om
       << ',' << m.net_revenue << ',' << m.cum_temp_variation << ','
       << m.renewable_utilization;
    return os.str();
}

json verify_json(const p2a_verify& v) {
    json j;
    j["empty"] = v.empty != 0;
    j["max_asr_dev_K"] = v.max_asr_dev;
    j["asr_worst_step"] = v.asr_worst_step;
    j["max_ms_dev_K"] = v.max_ms_dev;
    j["ms_worst_step"] = v.ms_worst_step;
    j["hs_residual_Nm3"] = v.hs_residual;
    j["hs_worst_step"] = v.hs_worst_step;
    j["bes_residual_J"] = v.bes_residual;
    j["bes_worst_step"] = v.bes_worst_step;
    j["power_violation_W"] = v.power_violation;
    j["power_worst_step"] = v.power_worst_step;
    return j;
}

json breakdown_json(const p2a_breakdown& b) {
    json j;
    j["ammonia_revenue_CNY"] = b.ammonia_revenue;
    j["grid_cost_CNY"] = b.grid_cost;
    j["startup_cost_CNY"] = b.startup_cost;
    j["capex_om_CNY"] = b.capex_om_cost;
    j["temp_penalty_K"] = b.temp_penalty;
    j["net_revenue_CNY"] = b.net_revenue;
    j["objective"] = b.objective;
    return j;
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            bail(2, "invalid", std::string(what) + ": bad number '" + item + "'");
        }
    }
    if (out.empty()) bail(2, "invalid", std::string(what) + ": empty list");
    return out;
}

int cmd_solve(RunCtx& ctx) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);

    ScheduleH sch;
    require_ok(p2a_solve(s.h, p.h, ctx.scheme.c_str(), ctx.solver().c_str(), &sch.h));
    int status = p2a_schedule_status(sch.h);

    CStr text;
    require_ok(p2a_schedule_to_csv(sch.h, &text.s));
    write_file(ctx.out("schedule.csv"), text.str());

    p2a_breakdown b{};
    require_ok(p2a_schedule_breakdown(sch.h, &b));
    write_file(ctx.out("breakdown.json"), breakdown_json(b).dump(2) + "\n");

    if (status == P2A_SOLVE_OPTIMAL) {
        p2a_verify v{};
        require_ok(p2a_schedule_verify(sch.h, s.h, p.h, ctx.scheme.c_str(), &v));
        write_file(ctx.out("verify.json"), verify_json(v).dump(2) + "\n");

        p2a_metrics m{};
        require_ok(p2a_schedule_metrics(sch.h, s.h, p.h, &m));
        write_file(ctx.out("metrics.csv"), metrics_header() + "\n" + metrics_row(m) + "\n");
    }
    ctx.write_manifest(solve_status_name(status));
    ctx.self_check();
    std::cout << "solve: " << solve_status_name(status) << ", net revenue "
              << b.net_revenue << " CNY -> " << ctx.out_dir << "\n";
    return status == P2A_SOLVE_OPTIMAL ? 0 : 1;
}

int cmd_verify(RunCtx& ctx, const std::string& schedule_path) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);
    ctx.inputs.emplace_back("schedule", schedule_path);

    ScheduleH sch;
    require_ok(p2a_schedule_from_csv(read_file(schedule_path).c_str(), &sch.h));
    p2a_verify v{};
    require_ok(p2a_schedule_verify(sch.h, s.h, p.h, ctx.scheme.c_str(), &v));
    write_file(ctx.out("verify.json"), verify_json(v).dump(2) + "\n");
    ctx.write_manifest("n/a");
    ctx.self_check();
    std::cout << "verify: max reactor dev " << v.max_asr_dev << " K, max salt dev "
              << v.max_ms_dev << " K, worst power gap " << v.power_violation << " W\n";
    return 0;
}

int cmd_compare(RunCtx& ctx) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);

    CStr csv;
    require_ok(p2a_compare_csv(s.h, p.h, ctx.scheme.c_str(), ctx.solver().c_str(), &csv.s));
    write_file(ctx.out("comparison.csv"), csv.str());
    ctx.write_manifest("n/a");
    ctx.self_check();
    std::cout << "compare: wrote " << (fs::path(ctx.out_dir) / "comparison.csv").string()
              << "\n";
    return 0;
}

int cmd_sweep(RunCtx& ctx, const std::string& axis1, const std::string& grid1,
              const std::string& axis2, const std::string& grid2) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);

    auto g1 = parse_grid(grid1, "--grid1");
    auto g2 = parse_grid(grid2, "--grid2");
    CStr csv;
    require_ok(p2a_sweep_csv(s.h, p.h, ctx.scheme.c_str(), axis1.c_str(), g1.data(),
                             static_cast<int>(g1.size()), axis2.c_str(), g2.data(),
                             static_cast<int>(g2.size()), ctx.solver().c_str(), &csv.s));
    write_file(ctx.out("sweep.csv"), csv.str());
    ctx.write_manifest("n/a");
    ctx.self_check();
    std::cout << "sweep: " << g1.size() * g2.size() << " cells -> "
              << (fs::path(ctx.out_dir) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_igdt(RunCtx& ctx, double beta, const std::string& betas, bool opportunistic) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);
    ctx.flags["direction"] = opportunistic ? "opportunistic" : "robust";

    if (!betas.empty()) {
        auto bs = parse_grid(betas, "--betas");
        CStr csv;
        require_ok(p2a_gap_sweep_csv(s.h, p.h, ctx.scheme.c_str(), ctx.solver().c_str(),
                                     opportunistic ? 1 : 0, bs.data(),
                                     static_cast<int>(bs.size()), &csv.s));
        write_file(ctx.out("igdt.csv"), csv.str());
        ctx.write_manifest("n/a");
        ctx.self_check();
        std::cout << "igdt sweep: " << bs.size() << " points -> "
                  << (fs::path(ctx.out_dir) / "igdt.csv").string() << "\n";
        return 0;
    }

    ctx.flags["beta"] = std::to_string(beta);
    double alpha = 0, baseline = 0;
    ScheduleH sch;
    require_ok(p2a_solve_gap(s.h, p.h, ctx.scheme.c_str(), ctx.solver().c_str(),
                             opportunistic ? 1 : 0, beta, &alpha, &baseline, &sch.h));
    int status = p2a_schedule_status(sch.h);

    json g;
    g["direction"] = opportunistic ? "opportunistic" : "robust";
    g["beta"] = beta;
    g["alpha"] = alpha;
    g["baseline_CNY"] = baseline;
    write_file(ctx.out("gap.json"), g.dump(2) + "\n");

    if (status == P2A_SOLVE_OPTIMAL) {
        CStr text;
        require_ok(p2a_schedule_to_csv(sch.h, &text.s));
        write_file(ctx.out("schedule.csv"), text.str());
        p2a_breakdown b{};
        require_ok(p2a_schedule_breakdown(sch.h, &b));
        write_file(ctx.out("breakdown.json"), breakdown_json(b).dump(2) + "\n");
    }
    ctx.write_manifest(solve_status_name(status));
    ctx.self_check();
    std::cout << "igdt " << (opportunistic ? "opportunistic" : "robust") << ": beta " << beta
              << " -> alpha " << alpha << " (" << solve_status_name(status) << ")\n";
    return status == P2A_SOLVE_OPTIMAL ? 0 : 1;
}

int cmd_rolling(RunCtx& ctx, int window) {
    Params p;
    Scenario s;
    ctx.load_params(p);
    ctx.load_scenario(s);
    ctx.flags["window"] = std::to_string(window);

    CStr rows, warnings;
    require_ok(p2a_rolling_csv(s.h, p.h, window, ctx.scheme.c_str(), ctx.solver().c_str(),
                               &rows.s, &warnings.s));
    write_file(ctx.out("rolling.csv"), rows.str());
    for (const auto& line : warnings.str().empty()
                                ? std::vector<std::string>{}
                                : std::vector<std::string>{warnings.str()})
        std::cerr << "p2asched: warning: " << one_line(line) << "\n";
    ctx.write_manifest("n/a");
    ctx.self_check();
    std::cout << "rolling: window " << window << " -> "
              << (fs::path(ctx.out_dir) / "rolling.csv").string() << "\n";
    return 0;
}

int cmd_estimate(const std::string& geometry) {
    double c = 0, r_asr = 0, r_tank = 0;
    require_ok(p2a_estimate_vessel(geometry.c_str(), &c, &r_asr, &r_tank));
    std::cout.precision(17);
    std::cout << "asr_capacitance_J_per_K = " << c << "\n"
              << "asr_loss_resistance_K_per_W = " << r_asr << "\n"
              << "tank_loss_resistance_K_per_W = " << r_tank << "\n";
    return 0;
}

int cmd_gen_profile(RunCtx& ctx, const p2a_genspec& base,
                    const std::vector<std::string>& lull_specs) {
    std::vector<p2a_lull> lulls;
    for (const auto& spec : lull_specs) {
        auto colon = spec.find(':');
        if (colon == std::string::npos) bail(2, "invalid", "--lull wants begin:end");
        try {
            lulls.push_back(
                {std::stoi(spec.substr(0, colon)), std::stoi(spec.substr(colon + 1))});
        } catch (const std::exception&) {
            bail(2, "invalid", "--lull wants integer begin:end, got '" + spec + "'");
        }
    }
    p2a_genspec g = base;
    g.lulls = lulls.data();
    g.lull_count = static_cast<int>(lulls.size());

    Scenario s;
    require_ok(p2a_scenario_generate(&g, &s.h));
    auto csv = ctx.out("profile.csv");
    auto side = ctx.out("profile.cfg");
    require_ok(p2a_scenario_save(s.h, csv.string().c_str(), side.string().c_str()));
    ctx.flags["seed"] = std::to_string(g.seed);
    ctx.flags["steps"] = std::to_string(g.steps);
    ctx.write_manifest("n/a");
    ctx.self_check();
    std::cout << "gen-profile: " << g.steps << " steps, seed " << g.seed << " -> "
              << csv.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Renewable power-to-ammonia plant scheduler"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(p2a_version()));

    RunCtx ctx;
    auto add_common = [&](CLI::App* sub, bool needs_scenario = true) {
        if (needs_scenario) {
            sub->add_option("--scenario", ctx.scenario_path, "scenario CSV path")->required();
            sub->add_option("--sidecar", ctx.sidecar_path,
                            "scenario sidecar (default: CSV path with .cfg)");
            sub->add_option("--horizon", ctx.horizon, "use only the first N steps");
            sub->add_option("--dt", ctx.dt, "override the step length in seconds");
        }
        sub->add_option("--config", ctx.config_path, "parameter config file");
        sub->add_option("--out", ctx.out_dir, "output directory (default: out)");
        sub->add_flag("--check", ctx.check, "re-read and validate every written file");
    };
    auto add_solver = [&](CLI::App* sub) {
        sub->add_option("--solver", ctx.solver_flag,
                        "external solver command with {lp} and {sol} placeholders");
        sub->add_flag("--tiny", ctx.tiny, "force the bundled solver");
    };

    // Each subcommand keeps its own scheme slot; CLI11 writes defaults through
    // the binding immediately, so a shared variable would take the last one.
    std::string scheme_solve = "none", scheme_verify = "none", scheme_sweep = "none";
    std::string scheme_compare = "scheme1,scheme2,scheme3,scheme4,scheme5";
    std::string scheme_igdt = "scheme4", scheme_rolling = "scheme2,scheme4";

    auto* solve = app.add_subcommand("solve", "optimize one scenario");
    add_common(solve);
    add_solver(solve);
    solve->add_option("--scheme", scheme_solve, "storage scheme");

    std::string schedule_path;
    auto* verify = app.add_subcommand("verify", "replay a schedule against the plant model");
    add_common(verify);
    verify->add_option("--schedule", schedule_path, "schedule CSV to verify")->required();
    verify->add_option("--scheme", scheme_verify, "storage scheme");

    auto* compare = app.add_subcommand("compare", "run several storage schemes side by side");
    add_common(compare);
    add_solver(compare);
    compare->add_option("--scheme", scheme_compare, "comma-separated scheme list");

    std::string axis1 = "ms_volume", axis2 = "bes_energy", grid1, grid2;
    auto* sweep = app.add_subcommand("sweep", "two-axis storage sizing sweep");
    add_common(sweep);
    add_solver(sweep);
    sweep->add_option("--scheme", scheme_sweep, "base storage scheme");
    sweep->add_option("--axis1", axis1, "bes_energy | hs_capacity | ms_volume");
    sweep->add_option("--grid1", grid1, "comma-separated axis-1 values")->required();
    sweep->add_option("--axis2", axis2, "bes_energy | hs_capacity | ms_volume");
    sweep->add_option("--grid2", grid2, "comma-separated axis-2 values")->required();

    double beta = 0.1;
    std::string betas;
    bool opportunistic = false;
    auto* igdt = app.add_subcommand("igdt", "uncertainty-gap solve or sweep");
    add_common(igdt);
    add_solver(igdt);
    igdt->add_option("--scheme", scheme_igdt, "storage scheme");
    igdt->add_option("--beta", beta, "revenue deviation fraction (single solve)");
    igdt->add_option("--betas", betas, "comma-separated beta sweep (writes igdt.csv)");
    igdt->add_flag("--opportunistic", opportunistic,
                   "windfall-seeking direction (default: robust)");

    int window = 24;
    auto* rolling = app.add_subcommand("rolling", "chained-window simulation");
    add_common(rolling);
    add_solver(rolling);
    rolling->add_option("--scheme", scheme_rolling, "comma-separated scheme list");
    rolling->add_option("--window", window, "steps per window")->required();

    std::string geometry;
    auto* estimate = app.add_subcommand("estimate-params", "thermal lump values from geometry");
    estimate->add_option("--geometry", geometry, "vessel geometry file")->required();

    p2a_genspec gspec{};
    gspec.steps = 48;
    gspec.dt = 3600;
    gspec.seed = 1;
    gspec.pv_peak = 1.0e8;
    gspec.wind_mean = 8.0e7;
    gspec.wind_sigma = 2.5e7;
    gspec.wind_ar1 = 0.9;
    gspec.ambient = 288.0;
    std::vector<std::string> lull_specs;
    auto* gen = app.add_subcommand("gen-profile", "synthesize a renewable scenario");
    add_common(gen, false);
    gen->add_option("--horizon", gspec.steps, "number of steps");
    gen->add_option("--dt", gspec.dt, "step length in seconds");
    gen->add_option("--seed", gspec.seed, "random seed");
    gen->add_option("--pv-peak", gspec.pv_peak, "solar noon PV power, W");
    gen->add_option("--wind-mean", gspec.wind_mean, "mean wind power, W");
    gen->add_option("--wind-sigma", gspec.wind_sigma, "wind standard deviation, W");
    gen->add_option("--wind-ar1", gspec.wind_ar1, "hour-to-hour wind persistence [0,1)");
    gen->add_option("--ambient", gspec.ambient, "ambient temperature, K");
    gen->add_option("--lull", lull_specs, "zero-renewable span begin:end (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
            return app.exit(e);
        std::cerr << "p2asched: error: usage: " << one_line(e.what()) << "\n";
        return 2;
    }

    try {
        if (solve->parsed()) {
            ctx.command = "solve";
            ctx.scheme = scheme_solve;
            ctx.flags["scheme"] = ctx.scheme;
            return cmd_solve(ctx);
        }
        if (verify->parsed()) {
            ctx.command = "verify";
            ctx.scheme = scheme_verify;
            ctx.flags["scheme"] = ctx.scheme;
            return cmd_verify(ctx, schedule_path);
        }
        if (compare->parsed()) {
            ctx.command = "compare";
            ctx.scheme = scheme_compare;
            ctx.flags["scheme"] = ctx.scheme;
            return cmd_compare(ctx);
        }
        if (sweep->parsed()) {
            ctx.command = "sweep";
            ctx.scheme = scheme_sweep;
            ctx.flags["scheme"] = ctx.scheme;
            ctx.flags["axis1"] = axis1;
            ctx.flags["axis2"] = axis2;
            return cmd_sweep(ctx, axis1, grid1, axis2, grid2);
        }
        if (igdt->parsed()) {
            ctx.command = "igdt";
            ctx.scheme = scheme_igdt;
            ctx.flags["scheme"] = ctx.scheme;
            return cmd_igdt(ctx, beta, betas, opportunistic);
        }
        if (rolling->parsed()) {
            ctx.command = "rolling";
            ctx.scheme = scheme_rolling;
            ctx.flags["scheme"] = ctx.scheme;
            return cmd_rolling(ctx, window);
        }
        if (estimate->parsed()) return cmd_estimate(geometry);
        if (gen->parsed()) {
            ctx.command = "gen-profile";
            return cmd_gen_profile(ctx, gspec, lull_specs);
        }
    } catch (const CliError& e) {
        std::cerr << "p2asched: error: " << e.category << ": " << one_line(e.message) << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "p2asched: error: internal: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 2;
}
