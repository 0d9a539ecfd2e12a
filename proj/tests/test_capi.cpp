#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "p2asched.h"

using doctest::Approx;

namespace {

std::string repo_file(const char* rel) {
    return std::string(P2A_REPO_DIR) + "/" + rel;
}

// Two calm hours, plant idling: small enough for the bundled solver.
p2a_scenario* make_idle_scenario() {
    p2a_genspec g{};
    g.steps = 2;
    g.dt = 3600;
    g.seed = 1;
    g.pv_peak = 0;
    g.wind_mean = 5e6;
    g.wind_sigma = 0;
    g.wind_ar1 = 0;
    g.ambient = 288;
    p2a_scenario* s = nullptr;
    REQUIRE(p2a_scenario_generate(&g, &s) == P2A_OK);
    REQUIRE(s != nullptr);
    return s;
}

struct StringOut {
    char* s = nullptr;
    ~StringOut() { p2a_string_free(s); }
};

}  // namespace

TEST_CASE("version and error text are always addressable") {
    CHECK(p2a_version() != nullptr);
    CHECK(std::string(p2a_version()).find('.') != std::string::npos);
    CHECK(p2a_last_error() != nullptr);
}

TEST_CASE("null arguments are rejected without touching outputs") {
    p2a_schedule* sch = reinterpret_cast<p2a_schedule*>(0x1);
    CHECK(p2a_params_create(nullptr) == P2A_EINVAL);
    CHECK(p2a_solve(nullptr, nullptr, "none", nullptr, &sch) == P2A_EINVAL);
    CHECK(sch == reinterpret_cast<p2a_schedule*>(0x1));
    CHECK(p2a_schedule_status(nullptr) == -1);
    CHECK(p2a_scenario_steps(nullptr) == -1);
    CHECK(p2a_scenario_dt(nullptr) == 0);
}

TEST_CASE("vessel estimates come straight from the geometry file") {
    double c = 0, r_asr = 0, r_tank = 0;
    REQUIRE(p2a_estimate_vessel(repo_file("data/geometry.cfg").c_str(), &c, &r_asr, &r_tank) ==
            P2A_OK);
    CHECK(c == 1.918e8);
    CHECK(r_asr > 0);
    CHECK(r_tank > 0);

    CHECK(p2a_estimate_vessel("/no/such/file.cfg", &c, nullptr, nullptr) != P2A_OK);
    CHECK(std::string(p2a_last_error()).find("file.cfg") != std::string::npos);
}

TEST_CASE("scenario generation, save, and reload round trip") {
    p2a_scenario* s = make_idle_scenario();
    CHECK(p2a_scenario_steps(s) == 2);
    CHECK(p2a_scenario_dt(s) == 3600);

    auto tmp = std::filesystem::temp_directory_path();
    std::string csv = (tmp / "capi_rt_scenario.csv").string();
    std::string side = (tmp / "capi_rt_scenario.cfg").string();
    REQUIRE(p2a_scenario_save(s, csv.c_str(), side.c_str()) == P2A_OK);

    p2a_scenario* back = nullptr;
    REQUIRE(p2a_scenario_load(csv.c_str(), side.c_str(), &back) == P2A_OK);
    CHECK(p2a_scenario_steps(back) == 2);
    CHECK(p2a_scenario_dt(back) == 3600);
    p2a_scenario_free(back);
    p2a_scenario_free(s);
    std::remove(csv.c_str());
    std::remove(side.c_str());
}

TEST_CASE("a solve round trips through status, breakdown, metrics, and verify") {
    p2a_scenario* s = make_idle_scenario();
    p2a_params* p = nullptr;
    REQUIRE(p2a_params_create(&p) == P2A_OK);

    p2a_schedule* sch = nullptr;
    REQUIRE(p2a_solve(s, p, "none", nullptr, &sch) == P2A_OK);
    REQUIRE(p2a_schedule_status(sch) == P2A_SOLVE_OPTIMAL);
    CHECK(p2a_schedule_steps(sch) == 2);

    p2a_breakdown b{};
    REQUIRE(p2a_schedule_breakdown(sch, &b) == P2A_OK);
    p2a_metrics m{};
    REQUIRE(p2a_schedule_metrics(sch, s, p, &m) == P2A_OK);
    CHECK(m.net_revenue == Approx(b.net_revenue));
    CHECK(m.nh3_total == Approx(0).scale(1));
    CHECK(m.renewable_utilization >= 0);
    CHECK(m.renewable_utilization <= 1);

    p2a_verify v{};
    REQUIRE(p2a_schedule_verify(sch, s, p, "none", &v) == P2A_OK);
    CHECK(v.empty == 0);
    CHECK(v.max_asr_dev < 2.0);
    CHECK(v.power_violation < 1.0);

    StringOut text;
    REQUIRE(p2a_schedule_to_csv(sch, &text.s) == P2A_OK);
    p2a_schedule* again = nullptr;
    REQUIRE(p2a_schedule_from_csv(text.s, &again) == P2A_OK);
    CHECK(p2a_schedule_steps(again) == 2);
    p2a_schedule_free(again);

    p2a_schedule_free(sch);
    p2a_params_free(p);
    p2a_scenario_free(s);
}

TEST_CASE("bad scheme names and beta values surface as validation errors") {
    p2a_scenario* s = make_idle_scenario();
    p2a_params* p = nullptr;
    REQUIRE(p2a_params_create(&p) == P2A_OK);

    p2a_schedule* sch = nullptr;
    CHECK(p2a_solve(s, p, "scheme9", nullptr, &sch) == P2A_EVALID);
    CHECK(std::string(p2a_last_error()).find("scheme9") != std::string::npos);

    double alpha = 0;
    CHECK(p2a_solve_gap(s, p, "none", nullptr, 0, -0.5, &alpha, nullptr, &sch) == P2A_EVALID);

    p2a_params_free(p);
    p2a_scenario_free(s);
}

TEST_CASE("batch entry points return csv text") {
    p2a_scenario* s = make_idle_scenario();
    p2a_params* p = nullptr;
    REQUIRE(p2a_params_create(&p) == P2A_OK);

    StringOut cmp;
    REQUIRE(p2a_compare_csv(s, p, "none,scheme3", nullptr, &cmp.s) == P2A_OK);
    CHECK(std::string(cmp.s).rfind("scheme,status,", 0) == 0);
    CHECK(std::string(cmp.s).find("\nnone,optimal,") != std::string::npos);
    CHECK(std::string(cmp.s).find("\nscheme3,optimal,") != std::string::npos);

    double betas[2] = {0.0, 0.2};
    StringOut gap;
    REQUIRE(p2a_gap_sweep_csv(s, p, "none", nullptr, 0, betas, 2, &gap.s) == P2A_OK);
    CHECK(std::string(gap.s).rfind("beta,alpha,status", 0) == 0);

    StringOut rows, warn;
    REQUIRE(p2a_rolling_csv(s, p, 1, "none", nullptr, &rows.s, &warn.s) == P2A_OK);
    CHECK(std::string(rows.s).rfind("window,scheme,status,", 0) == 0);
    CHECK(std::string(warn.s).empty());
    CHECK(p2a_rolling_csv(s, p, 5, "none", nullptr, &rows.s, nullptr) == P2A_EVALID);

    p2a_params_free(p);
    p2a_scenario_free(s);
}
