#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "p2a/params.hpp"
#include "p2a/util.hpp"

using namespace p2a;
using namespace p2a::params;

namespace {

std::string repo_file(const char* rel) {
    return std::string(P2A_REPO_DIR) + "/" + rel;
}

std::string temp_path(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / "p2a_params_test";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

ReactorGeometry reference_reactor_geometry() {
    ReactorGeometry g{};
    g.shell_mass = 205187.5;
    g.shell_specific_heat = 480;
    g.internals_mass = 73000;
    g.internals_specific_heat = 500;
    g.catalyst_mass = 87400;
    g.catalyst_specific_heat = 650;
    g.wall_thickness = 0.2;
    g.wall_conductivity = 48;
    g.insulation_thickness = 0.022;
    g.insulation_conductivity = 0.035;
    g.side_wall_area = 143.759;
    g.end_wall_area = 3.801;
    g.side_insulation_area = 116.643;
    g.end_insulation_area = 2.607;
    return g;
}

}  // namespace

TEST_CASE("defaults validate") {
    ParamSet p = defaults();
    CHECK_NOTHROW(validate(p));
    CHECK(p.thermal.asr_capacitance == 1.918e8);
    CHECK(p.op.load_min == 0.3);
    CHECK(p.econ.component_costs.size() == 7);
}

TEST_CASE("reaction heat matches stoichiometry") {
    // 24.9 t/h of ammonia at 17 g/mol and 46.1 kJ/mol exothermic.
    CHECK(stoichiometric_reaction_heat(24.9) == doctest::Approx(1.8756372549019608e7).epsilon(1e-12));
    CHECK(defaults().thermal.reaction_heat_coeff ==
          doctest::Approx(1.8756372549019608e7).epsilon(1e-12));
    CHECK(stoichiometric_reaction_heat(0) == 0);
}

TEST_CASE("capacitance estimate sums lumped masses exactly") {
    ReactorGeometry g = reference_reactor_geometry();
    CHECK(g.shell_mass * g.shell_specific_heat == 9.849e7);
    CHECK(g.internals_mass * g.internals_specific_heat == 3.65e7);
    CHECK(g.catalyst_mass * g.catalyst_specific_heat == 5.681e7);
    CHECK(estimate_capacitance(g) == 1.918e8);
}

TEST_CASE("loss resistance estimate: series layers, parallel paths") {
    ReactorGeometry g = reference_reactor_geometry();
    double r = estimate_loss_resistance(g);
    CHECK(r == doctest::Approx(5.1858e-3).epsilon(1e-3));
    // nominal rounded figure used by the default parameter set
    CHECK(r == doctest::Approx(0.0052).epsilon(0.02));
}

TEST_CASE("shipped geometry file reproduces the default thermal constants") {
    GeometrySet gs = load_geometry(repo_file("data/geometry.cfg"));
    CHECK(estimate_capacitance(gs.asr) == 1.918e8);
    CHECK(estimate_loss_resistance(gs.asr) == doctest::Approx(0.0052).epsilon(0.02));
    CHECK(estimate_loss_resistance(gs.tank) == doctest::Approx(0.0535).epsilon(0.02));
}

TEST_CASE("estimators reject non-physical inputs") {
    ReactorGeometry g = reference_reactor_geometry();
    g.wall_conductivity = 0;
    CHECK_THROWS_AS(estimate_loss_resistance(g), ValidationError);
    ReactorGeometry z{};
    CHECK_THROWS_AS(estimate_capacitance(z), ValidationError);
}

TEST_CASE("capital recovery factor") {
    CHECK(capital_recovery_factor(0.08, 12) == doctest::Approx(0.13269502).epsilon(1e-6));
    CHECK(capital_recovery_factor(0, 10) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS_AS(capital_recovery_factor(0.08, 0), ValidationError);
}

TEST_CASE("battery downsizing cost delta over fifteen days") {
    // Swapping a 32 MWh battery for 4 MWh at 1700 CNY/kWh, 12-year life, 2% O&M,
    // 5% discount rate changes the prorated 15-day charge by about 259.8 kCNY.
    ParamSet p = defaults();
    p.econ.discount_rate = 0.05;
    double big = capex_om_cost(p.econ, 15.0);
    for (auto& c : p.econ.component_costs)
        if (c.name == "bes") c.capacity = 4000.0;
    double small = capex_om_cost(p.econ, 15.0);
    CHECK(big - small == doctest::Approx(259828.0).epsilon(5e-3));
}

TEST_CASE("capex is the CRF-plus-OM sum prorated by days") {
    ParamSet p = defaults();
    double annual = 0;
    for (const auto& c : p.econ.component_costs)
        annual += c.unit_cost * c.capacity *
                  (capital_recovery_factor(p.econ.discount_rate, c.life_years) + c.om_ratio);
    CHECK(capex_om_cost(p.econ, 365.0) == doctest::Approx(annual).epsilon(1e-12));
    CHECK(capex_om_cost(p.econ, 15.0) == doctest::Approx(annual * 15 / 365).epsilon(1e-12));
}

TEST_CASE("molten salt energy density follows the configured band") {
    ParamSet p = defaults();
    CHECK(mstes_kwh_per_m3(p.thermal, p.op) == doctest::Approx(226.71788).epsilon(1e-6));
    // default tank component capacity is the 20 m3 tank across the full band
    for (const auto& c : p.econ.component_costs)
        if (c.name == "ms_tes") CHECK(c.capacity == doctest::Approx(4534.3576).epsilon(1e-6));
}

TEST_CASE("config round trip is value-exact") {
    ParamSet p = defaults();
    p.op.grid_import_max = 0;
    p.econ.temp_penalty_quadratic = true;
    std::string first = save_config(p);
    ParamSet q = defaults();
    apply_config(q, KvFile::parse_text(first, "first"));
    CHECK(save_config(q) == first);
    CHECK(q.op.grid_import_max == 0);
    CHECK(q.econ.temp_penalty_quadratic);
    CHECK(q.thermal.asr_capacitance == p.thermal.asr_capacitance);
}

TEST_CASE("config unit suffixes normalize to SI") {
    ParamSet p = defaults();
    apply_config(p, KvFile::parse_text(
                        "ambient_temp_C = 15\n"
                        "cooling_duty_max_MW = 4.2\n"
                        "grid_price_CNY_per_kWh = 1.2\n"
                        "bes_energy_max_MWh = 28.8\n",
                        "units"));
    CHECK(p.thermal.ambient_temp == 288.15);
    CHECK(p.op.cooling_duty_max == 4.2e6);
    CHECK(p.econ.grid_price == doctest::Approx(1.2e-3).epsilon(1e-15));
    CHECK(p.op.bes_energy_max == doctest::Approx(28.8 * 3.6e9).epsilon(1e-15));
}

TEST_CASE("config rejects unknown keys and double assignment") {
    ParamSet p = defaults();
    CHECK_THROWS_WITH_AS(apply_config(p, KvFile::parse_text("no_such_key = 1\n", "x")),
                         doctest::Contains("no_such_key"), ValidationError);
    CHECK_THROWS_AS(
        apply_config(p, KvFile::parse_text("ambient_temp_K = 288\nambient_temp_C = 15\n", "x")),
        ValidationError);
}

TEST_CASE("validation names the offending field") {
    ParamSet p = defaults();
    p.op.suh_heat_duty_max = p.op.suh_power_max;  // exceeds eff * power
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("suh_heat_duty_max"), ValidationError);
    p = defaults();
    p.thermal.rig_temp_standby = p.thermal.rig_temp_production - 1;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("rig_temp_standby"), ValidationError);
    p = defaults();
    p.econ.temp_setpoint = 100;
    CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("temp_setpoint"), ValidationError);
}

TEST_CASE("transition matrix DSL") {
    ParamSet p = defaults();
    const auto& m = p.op.transitions.allowed;
    auto idx = [](Mode x) { return static_cast<int>(x); };
    CHECK(m[idx(Mode::shutdown)][idx(Mode::cold_start)]);
    CHECK_FALSE(m[idx(Mode::shutdown)][idx(Mode::production)]);
    CHECK(m[idx(Mode::cold_start)][idx(Mode::production)]);
    CHECK_FALSE(m[idx(Mode::cold_start)][idx(Mode::standby)]);
    CHECK(m[idx(Mode::production)][idx(Mode::standby)]);
    CHECK(m[idx(Mode::standby)][idx(Mode::production)]);
    CHECK(m[idx(Mode::standby)][idx(Mode::shutdown)]);
    CHECK_FALSE(m[idx(Mode::standby)][idx(Mode::cold_start)]);

    CHECK(transition_from_string(transition_to_string(p.op.transitions)) == p.op.transitions);
    CHECK_THROWS_AS(transition_from_string("shutdown:shutdown"), ValidationError);  // others empty
    CHECK_THROWS_AS(transition_from_string("bogus:shutdown"), ValidationError);
}

TEST_CASE("builtin schemes match the comparison matrix") {
    auto all = builtin_schemes();
    REQUIRE(all.size() == 5);
    CHECK(all[0].has_bes);
    CHECK(all[0].has_hs);
    CHECK_FALSE(all[0].has_mstes);
    CHECK(all[1].has_hs);
    CHECK_FALSE(all[1].has_bes);
    CHECK(all[2].has_mstes);
    CHECK_FALSE(all[2].has_hs);
    CHECK(all[3].has_bes);
    CHECK(all[3].has_hs);
    CHECK(all[3].has_mstes);
    CHECK(all[4].bes_energy == doctest::Approx(4 * 3.6e9).epsilon(1e-12));
    CHECK(all[0].bes_energy == doctest::Approx(32 * 3.6e9).epsilon(1e-12));
    StorageScheme none = builtin_scheme("none");
    CHECK_FALSE(none.has_bes);
    CHECK_FALSE(none.has_hs);
    CHECK_FALSE(none.has_mstes);
    CHECK_THROWS_AS(builtin_scheme("scheme9"), ValidationError);
}

TEST_CASE("scenario loader reads csv plus sidecar") {
    std::string csv = temp_path("prof.csv");
    std::string side = temp_path("prof.cfg");
    write_file(csv,
               "wind_MW,pv_MW\n"
               "10,0\n"
               "20,5\n"
               "0,0\n");
    write_file(side,
               "dt_h = 1\n"
               "initial_asr_temp_K = 733\n"
               "initial_ms_temp_C = 536.85\n"
               "initial_mode = production\n"
               "initial_load = 0.5\n"
               "initial_hs_frac = 0.25\n"
               "ambient_temp_C = 15\n");
    ScenarioProfile s = load_scenario(csv, side);
    CHECK(s.dt == 3600);
    CHECK(s.horizon_steps == 3);
    CHECK(s.wind[1] == 2e7);
    CHECK(s.pv[1] == 5e6);
    CHECK(s.initial_asr_temp == 733);
    CHECK(s.initial_ms_temp == doctest::Approx(810).epsilon(1e-12));
    CHECK(s.initial_mode == Mode::production);
    CHECK(s.initial_load == 0.5);
    CHECK(s.initial_hs_frac == 0.25);
    CHECK(ambient_at(s, 0) == doctest::Approx(288.15).epsilon(1e-12));
    CHECK(ambient_at(s, 2) == doctest::Approx(288.15).epsilon(1e-12));

    write_file(side, "dt_h = 1\ninitial_ms_temp_K = 810\n");
    CHECK_THROWS_WITH_AS(load_scenario(csv, side), doctest::Contains("initial_asr_temp"),
                         ValidationError);
}

TEST_CASE("scenario validation catches bad shapes") {
    ScenarioProfile s;
    s.dt = 3600;
    s.horizon_steps = 2;
    s.wind = {1.0, 2.0};
    s.pv = {1.0};
    s.initial_asr_temp = 733;
    s.initial_ms_temp = 810;
    CHECK_THROWS_WITH_AS(validate_scenario(s), doctest::Contains("pv"), ValidationError);
    s.pv = {1.0, -2.0};
    CHECK_THROWS_AS(validate_scenario(s), ValidationError);
}
