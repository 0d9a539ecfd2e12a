#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "p2a/milp.hpp"
#include "p2a/params.hpp"
#include "p2a/sched.hpp"
#include "p2a/thermal.hpp"
#include "p2a/util.hpp"

using namespace p2a;
using namespace p2a::sched;
using doctest::Approx;
using milp::Sense;
using params::Mode;

namespace {

struct Fixture {
    params::ParamSet p = params::defaults();
    const params::ThermalParams& t = p.thermal;
    const params::OperationalParams& op = p.op;
};

params::ScenarioProfile scen(int steps, std::vector<double> wind, Mode mode, double load0 = 0,
                             double t0 = 733, double tms0 = 810) {
    params::ScenarioProfile s;
    s.dt = 3600;
    s.horizon_steps = steps;
    s.wind = std::move(wind);
    if (static_cast<int>(s.wind.size()) == 1 && steps > 1)
        s.wind.assign(static_cast<size_t>(steps), s.wind[0]);
    s.pv.assign(static_cast<size_t>(steps), 0.0);
    s.ambient = {288.0};
    s.initial_asr_temp = t0;
    s.initial_ms_temp = tms0;
    s.initial_mode = mode;
    s.initial_load = load0;
    return s;
}

Schedule solve_and_decode(const ModelBundle& b, const params::ParamSet& p) {
    auto sol = milp::solve_tiny(b.model, p.tol);
    REQUIRE(sol.status == milp::SolveStatus::optimal);
    return decode(b, sol);
}

// One production step at pinned minimum load from a 733 K start, both heaters
// at their caps: the reactor ends well below the setpoint but above ambient.
double entry_dip_end(const Fixture& f, double dt) {
    double q = thermal::reaction_heat(f.op.load_min, f.t) +
               thermal::gas_enthalpy_net(Mode::production, f.op.load_min, f.t, f.op) +
               f.op.ms_heat_duty_max + f.op.suh_heat_duty_max -
               thermal::asr_heat_loss(733, 288, f.t);
    return 733 + dt / f.t.asr_capacitance * q;
}

}  // namespace

TEST_CASE("scheme overlay rewrites storage bands and cost bases") {
    Fixture f;
    auto s1 = params::builtin_scheme("scheme1");
    auto eff = apply_scheme(f.p, s1);
    CHECK(eff.op.bes_energy_min == Approx(0.1 * s1.bes_energy).epsilon(1e-12));
    CHECK(eff.op.bes_energy_max == Approx(0.9 * s1.bes_energy).epsilon(1e-12));
    CHECK(eff.op.bes_charge_max == s1.bes_power);
    CHECK(eff.op.bes_discharge_max == s1.bes_power);
    CHECK(eff.op.hs_min == Approx(0.1 * s1.hs_capacity).epsilon(1e-12));
    CHECK(eff.op.hs_max == Approx(0.9 * s1.hs_capacity).epsilon(1e-12));

    auto cap_of = [](const params::ParamSet& p, const std::string& name) {
        for (const auto& c : p.econ.component_costs)
            if (c.name == name) return c.capacity;
        return -1.0;
    };
    CHECK(cap_of(eff, "bes") == Approx(s1.bes_energy / 3.6e6).epsilon(1e-12));
    CHECK(cap_of(eff, "hydrogen_storage") ==
          Approx(params::kH2KgPerNm3 * s1.hs_capacity).epsilon(1e-12));
    CHECK(cap_of(eff, "ms_tes") == 0);  // no tank in this scheme

    auto s3 = params::builtin_scheme("scheme3");
    auto eff3 = apply_scheme(f.p, s3);
    CHECK(eff3.op.bes_energy_max == 0);
    CHECK(eff3.op.bes_charge_max == 0);
    CHECK(eff3.op.hs_max == 0);
    CHECK(eff3.thermal.ms_volume == s3.ms_volume);
    CHECK(cap_of(eff3, "ms_tes") ==
          Approx(params::mstes_kwh_per_m3(eff3.thermal, eff3.op) * s3.ms_volume).epsilon(1e-12));
}

TEST_CASE("inconsistent scheme fields are rejected") {
    Fixture f;
    params::StorageScheme s = params::builtin_scheme("none");
    s.bes_energy = 1e9;  // capacity given for an absent battery
    CHECK_THROWS_AS(apply_scheme(f.p, s), ValidationError);

    s = params::builtin_scheme("scheme1");
    s.bes_power = 0;  // present but not positive
    CHECK_THROWS_AS(apply_scheme(f.p, s), ValidationError);

    s = params::builtin_scheme("scheme3");
    s.has_mstes = false;  // volume left behind
    CHECK_THROWS_AS(apply_scheme(f.p, s), ValidationError);
}

TEST_CASE("initial storage levels resolve fractionally or verbatim") {
    Fixture f;
    auto eff = apply_scheme(f.p, params::builtin_scheme("scheme1"));
    auto s = scen(1, {1e8}, Mode::standby);

    s.initial_bes_frac = 0.25;
    double band = eff.op.bes_energy_max - eff.op.bes_energy_min;
    CHECK(initial_bes_energy(s, eff.op) ==
          Approx(eff.op.bes_energy_min + 0.25 * band).epsilon(1e-12));

    s.initial_bes_energy = 2e10;  // inside the band, used verbatim
    CHECK(initial_bes_energy(s, eff.op) == 2e10);
    s.initial_bes_energy = 1e9;  // below the working floor
    CHECK_THROWS_AS(initial_bes_energy(s, eff.op), ValidationError);

    s.initial_hs_frac = 0.5;
    CHECK(initial_hs_level(s, eff.op) ==
          Approx(0.5 * (eff.op.hs_min + eff.op.hs_max)).epsilon(1e-12));
    s.initial_hs_level = eff.op.hs_max + 1;
    CHECK_THROWS_AS(initial_hs_level(s, eff.op), ValidationError);
}

TEST_CASE("variable census and scheme fixing") {
    Fixture f;
    auto s = scen(3, {1e8, 1e8, 1e8}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme1"));
    CHECK(b.model.num_vars() == 3 * 31);
    int binaries = 0;
    for (auto ty : b.model.var_types)
        if (ty == milp::VarType::binary) ++binaries;
    CHECK(binaries == 36);
    // The salt loop selector is fixed shut without a tank; batteries stay free.
    CHECK(b.model.num_free_binaries() == 33);
    CHECK(!b.alpha.valid());

    auto s2 = scen(2, {1e8, 1e8}, Mode::standby);
    BuildOptions opt;
    opt.embed = Embed::robust;
    opt.beta = 0.1;
    opt.baseline_revenue = 1e5;
    auto br = build_full_model(s2, f.p, params::builtin_scheme("scheme4"), opt);
    CHECK(br.model.num_vars() == 2 * 31 + 1);
    CHECK(br.alpha.valid());
    CHECK(br.model.num_free_binaries() == 24);
    bool has_floor = false;
    for (const auto& row : br.model.rows) has_floor = has_floor || row.name == "rev_floor";
    CHECK(has_floor);
}

TEST_CASE("standby hold: salt duty meets the loss exactly") {
    Fixture f;
    // Renewables cover exactly the standby auxiliaries, nothing else.
    auto s = scen(1, {f.op.aux_base_power}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sch = solve_and_decode(b, b.p);

    REQUIRE(sch.steps.size() == 1);
    CHECK(sch.steps[0].mode == Mode::standby);
    double loss = thermal::asr_heat_loss(733, 288, f.t);
    CHECK(sch.steps[0].ms_heat_duty == Approx(loss).epsilon(1e-9));
    CHECK(sch.steps[0].suh_heat_duty == 0);
    CHECK(sch.steps[0].ms_heater_power == 0);
    CHECK(sch.steps[0].asr_temp == Approx(733).epsilon(1e-9));
    CHECK(sch.breakdown.temp_penalty == Approx(0).scale(1));

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.max_asr_dev < 0.01);
    CHECK(rep.power_violation <= 1e-6);
}

TEST_CASE("shutdown decay follows the loss resistance") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(1, {0.0}, Mode::shutdown);
    auto b = build_full_model(s, f.p, params::builtin_scheme("none"));
    auto sch = solve_and_decode(b, b.p);

    CHECK(sch.steps[0].mode == Mode::shutdown);
    CHECK(!sch.steps[0].inoff);
    CHECK(!sch.steps[0].outoff);
    double expect = 733 - s.dt / f.t.asr_capacitance * thermal::asr_heat_loss(733, 288, f.t);
    CHECK(sch.steps[0].asr_temp == Approx(expect).epsilon(1e-9));
    double rvc = thermal::ms_capacitance(f.t);
    double expect_ms = 810 - s.dt / rvc * thermal::ms_heat_loss(810, 288, f.t);
    CHECK(sch.steps[0].ms_temp == Approx(expect_ms).epsilon(1e-9));
    // Deviation accounting pauses while the plant is down.
    CHECK(sch.breakdown.temp_penalty == 0);
    CHECK(sch.breakdown.capex_om_cost > 0);
    CHECK(sch.breakdown.objective ==
          Approx(-f.p.econ.weight_profit * sch.breakdown.capex_om_cost).epsilon(1e-9));

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.max_asr_dev < 0.01);
    CHECK(rep.max_ms_dev < 0.01);
}

TEST_CASE("no power: production is infeasible, the plant trips to shutdown") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(1, {0.0}, Mode::standby);

    auto forced = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    forced.model.add_row("force_on", forced.steps[0].on, Sense::eq, 1.0);
    CHECK(milp::solve_tiny(forced.model, forced.p.tol).status == milp::SolveStatus::infeasible);

    // Unforced, the auxiliaries are unpayable, so standby itself is out and the
    // plant pays the shutdown charge.
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    auto sch = solve_and_decode(b, b.p);
    CHECK(sch.steps[0].mode == Mode::shutdown);
    CHECK(sch.steps[0].inoff);
    CHECK(sch.breakdown.startup_cost == Approx(f.p.econ.startup_cost));
    CHECK(sch.breakdown.temp_penalty == 0);
}

TEST_CASE("no power, no auxiliary draw: unheated standby beats a shutdown") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    f.p.op.aux_base_power = 0;
    auto s = scen(1, {0.0}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    auto sch = solve_and_decode(b, b.p);

    CHECK(sch.steps[0].mode == Mode::standby);
    CHECK(sch.steps[0].ms_heat_duty == 0);  // no tank in this scheme
    CHECK(sch.steps[0].suh_heat_duty == 0);
    // The recycle carries no net enthalpy, so the sag is the bare loss decay.
    double expect = 733 - s.dt / f.t.asr_capacitance * thermal::asr_heat_loss(733, 288, f.t);
    CHECK(sch.steps[0].asr_temp == Approx(expect).epsilon(1e-9));
    CHECK(sch.breakdown.temp_penalty == Approx(733 - expect).epsilon(1e-6));
}

TEST_CASE("production entry: pinned load, released ramp, tank gate binding") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    // Rich first step funds the entry burst; the second step leaves only the
    // standby floor, so the burst cannot repeat and the heaters go quiet.
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sch = solve_and_decode(b, b.p);

    REQUIRE(sch.steps.size() == 2);
    CHECK(sch.steps[0].mode == Mode::production);
    CHECK(sch.steps[1].mode == Mode::standby);
    CHECK(sch.steps[0].startup);
    CHECK(sch.steps[1].shutdown);
    CHECK(!sch.steps[0].inoff);
    CHECK(!sch.steps[1].outoff);
    CHECK(sch.steps[0].load == Approx(f.op.load_min).epsilon(1e-9));
    CHECK(sch.steps[1].load == 0);

    // Entry hour: both heaters at their caps, cooling off.
    CHECK(sch.steps[0].ms_heat_duty == Approx(f.op.ms_heat_duty_max).epsilon(1e-9));
    CHECK(sch.steps[0].suh_heat_duty == Approx(f.op.suh_heat_duty_max).epsilon(1e-9));
    CHECK(sch.steps[0].cooling_duty == 0);
    CHECK(sch.steps[0].ms_heater_power == Approx(f.op.ms_heater_power_max).epsilon(1e-9));
    CHECK(sch.steps[0].grid_import == 0);
    double t0 = entry_dip_end(f, s.dt);
    CHECK(sch.steps[0].asr_temp == Approx(t0).epsilon(1e-9));

    // Second step: the tank feeds the reheat until its gate temperature binds.
    double rvc = thermal::ms_capacitance(b.p.thermal);
    double tms0 = 810 + s.dt / rvc *
                            (f.op.ms_heater_eff * f.op.ms_heater_power_max -
                             f.op.ms_heat_duty_max / f.op.ms_exchanger_eff -
                             thermal::ms_heat_loss(810, 288, f.t));
    CHECK(sch.steps[0].ms_temp == Approx(tms0).epsilon(1e-9));
    double gate = f.t.rig_temp_standby + f.t.ms_approach_gap;
    CHECK(sch.steps[1].ms_temp == Approx(gate).epsilon(1e-9));
    double qms1 = f.op.ms_exchanger_eff *
                  ((tms0 - gate) * rvc / s.dt - thermal::ms_heat_loss(tms0, 288, f.t));
    CHECK(sch.steps[1].ms_heat_duty == Approx(qms1).epsilon(1e-6));
    double qsu1 = (4.0e6 - f.op.aux_base_power) * f.op.suh_eff;
    CHECK(sch.steps[1].suh_heat_duty == Approx(qsu1).epsilon(1e-6));
    double t1 = t0 + s.dt / f.t.asr_capacitance *
                         (qms1 + qsu1 - thermal::asr_heat_loss(t0, 288, f.t));
    CHECK(sch.steps[1].asr_temp == Approx(t1).epsilon(1e-7));

    CHECK(sch.breakdown.ammonia_revenue ==
          Approx(f.p.econ.nh3_price * f.op.nh3_rate_rated * f.op.load_min).epsilon(1e-9));
    CHECK(sch.breakdown.temp_penalty == Approx((733 - t0) + (733 - t1)).epsilon(1e-6));

    // Battery block is absent from this scheme.
    CHECK(sch.steps[0].bes_charge == 0);
    CHECK(sch.steps[0].bes_discharge == 0);
    CHECK(sch.steps[0].bes_energy == 0);

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.hs_residual <= 1e-6);
    CHECK(rep.bes_residual <= 1e-6);
    CHECK(rep.power_violation <= 1e-6);
    CHECK(rep.max_asr_dev < 2.0);
}

TEST_CASE("objective is invariant under big-M inflation") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);
    auto base = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sol_base = milp::solve_tiny(base.model, base.p.tol);

    auto inflated = f.p;
    inflated.tol.big_m_scale = 10.0;
    auto big = build_full_model(s, inflated, params::builtin_scheme("scheme3"));
    auto sol_big = milp::solve_tiny(big.model, big.p.tol);

    REQUIRE(sol_base.status == milp::SolveStatus::optimal);
    REQUIRE(sol_big.status == milp::SolveStatus::optimal);
    CHECK(sol_big.objective ==
          Approx(sol_base.objective).epsilon(1e-6));
    auto a = decode(base, sol_base), bb = decode(big, sol_big);
    for (size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].mode == bb.steps[i].mode);
        CHECK(a.steps[i].load == Approx(bb.steps[i].load).epsilon(1e-6));
    }
}

TEST_CASE("joint weight scaling rescales the objective, not the argmax") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);
    auto base = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sol_base = milp::solve_tiny(base.model, base.p.tol);

    auto scaled_p = f.p;
    scaled_p.econ.weight_profit *= 3;
    scaled_p.econ.weight_temp *= 3;
    auto scaled = build_full_model(s, scaled_p, params::builtin_scheme("scheme3"));
    auto sol_scaled = milp::solve_tiny(scaled.model, scaled.p.tol);

    REQUIRE(sol_base.status == milp::SolveStatus::optimal);
    REQUIRE(sol_scaled.status == milp::SolveStatus::optimal);
    CHECK(sol_scaled.objective == Approx(3 * sol_base.objective).epsilon(1e-9));
    auto a = decode(base, sol_base), bb = decode(scaled, sol_scaled);
    for (size_t i = 0; i < a.steps.size(); ++i) {
        CHECK(a.steps[i].mode == bb.steps[i].mode);
        CHECK(a.steps[i].load == Approx(bb.steps[i].load).epsilon(1e-9));
        CHECK(a.steps[i].asr_temp == Approx(bb.steps[i].asr_temp).epsilon(1e-9));
    }
}

TEST_CASE("widening the grid cap never hurts the objective") {
    Fixture f;
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);

    auto tight_p = f.p;
    tight_p.op.grid_import_max = 0;
    auto tight = build_full_model(s, tight_p, params::builtin_scheme("scheme3"));
    auto sol_tight = milp::solve_tiny(tight.model, tight.p.tol);

    auto wide = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sol_wide = milp::solve_tiny(wide.model, wide.p.tol);

    REQUIRE(sol_tight.status == milp::SolveStatus::optimal);
    REQUIRE(sol_wide.status == milp::SolveStatus::optimal);
    CHECK(sol_wide.objective >= sol_tight.objective - 1e-6);
    // Importing a little power to finish the reheat is strictly worth it here.
    CHECK(sol_wide.objective > sol_tight.objective + 100);
}

TEST_CASE("ramp limits bind between steps and release on events") {
    Fixture f;
    auto s = scen(2, {2.6e8, 2.6e8}, Mode::production, 0.3);

    auto blocked = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    blocked.model.add_row("force_l1", blocked.steps[1].load, Sense::ge, 0.81);
    CHECK(milp::solve_tiny(blocked.model, blocked.p.tol).status ==
          milp::SolveStatus::infeasible);

    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    b.model.add_row("force_l1", b.steps[1].load, Sense::ge, 0.80);
    auto sch = solve_and_decode(b, b.p);
    CHECK(sch.steps[0].mode == Mode::production);
    CHECK(sch.steps[1].mode == Mode::production);
    CHECK(sch.steps[0].load == Approx(0.55).epsilon(1e-9));
    CHECK(sch.steps[1].load == Approx(0.80).epsilon(1e-9));
    CHECK(sch.steps[0].asr_temp == Approx(733).epsilon(1e-9));
    CHECK(sch.steps[1].asr_temp == Approx(733).epsilon(1e-9));
    CHECK(sch.breakdown.temp_penalty == Approx(0).scale(1));
    CHECK(sch.steps[0].h2_to_as == Approx(f.op.h2_consumption_rated * 0.55).epsilon(1e-9));
    CHECK(sch.steps[1].nh3_output == Approx(f.op.nh3_rate_rated * 0.80).epsilon(1e-9));
}

TEST_CASE("forced entry pins the load to the minimum") {
    Fixture f;
    auto s = scen(2, {2.6e8, 2.6e8}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    b.model.add_row("force_on1", b.steps[1].on, Sense::eq, 1.0);
    b.model.add_row("force_off0", b.steps[0].on, Sense::eq, 0.0);
    auto sch = solve_and_decode(b, b.p);

    CHECK(sch.steps[0].mode == Mode::standby);
    CHECK(sch.steps[1].mode == Mode::production);
    CHECK(sch.steps[1].startup);
    CHECK(sch.steps[1].load == Approx(f.op.load_min).epsilon(1e-9));
    // Holding the setpoint before entry is cheaper than banking heat: the
    // loss grows with temperature, so the pre-entry hold sits at 733 exactly.
    CHECK(sch.steps[0].asr_temp == Approx(733).epsilon(1e-7));
    CHECK(sch.steps[1].asr_temp == Approx(entry_dip_end(f, s.dt)).epsilon(1e-7));
}

TEST_CASE("hydrogen buffer telescopes and closes cyclically") {
    Fixture f;
    auto s = scen(2, {2.6e8, 2.6e8}, Mode::production, 0.8);
    s.initial_hs_frac = 0.5;
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    auto sch = solve_and_decode(b, b.p);

    double hs0 = initial_hs_level(s, b.p.op);
    CHECK(sch.steps[1].hs_level == Approx(hs0).epsilon(1e-9));
    // Total output is capped by the electrolyzer, whatever the load split.
    double total_load = 2.0 * f.op.hp_flow_max / f.op.h2_consumption_rated;
    CHECK(sch.breakdown.ammonia_revenue ==
          Approx(f.p.econ.nh3_price * f.op.nh3_rate_rated * total_load).epsilon(1e-9));
    CHECK(sch.steps[0].asr_temp == Approx(733).epsilon(1e-9));
    CHECK(sch.steps[1].asr_temp == Approx(733).epsilon(1e-9));

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.hs_residual <= 1e-6);
    CHECK(rep.power_violation <= 1e-6);
}

TEST_CASE("battery balance without the cyclic tie") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(1, {5.0e6}, Mode::standby);
    s.initial_bes_frac = 0.5;
    BuildOptions opt;
    opt.cyclic_storage = false;
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme5"), opt);
    b.model.add_row("force_cha", b.steps[0].p_cha, Sense::eq, 1.0e6);
    auto sch = solve_and_decode(b, b.p);

    // Standby holds: tripping to shutdown would release the small sag penalty
    // but charge the transition cost, and production has no power budget.
    CHECK(sch.steps[0].mode == Mode::standby);
    double bes0 = initial_bes_energy(s, b.p.op);
    CHECK(sch.steps[0].bes_charge == Approx(1.0e6).epsilon(1e-12));
    CHECK(sch.steps[0].bes_discharge == 0);
    CHECK(sch.steps[0].bes_energy == Approx(bes0 + 3600.0 * 1.0e6).epsilon(1e-12));

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.bes_residual <= 1e-3);
}

TEST_CASE("quadratic penalty form is not supported by the linear builder") {
    Fixture f;
    f.p.econ.temp_penalty_quadratic = true;
    auto s = scen(1, {1e8}, Mode::standby);
    CHECK_THROWS_AS(build_full_model(s, f.p, params::builtin_scheme("scheme3")),
                    ValidationError);
}

TEST_CASE("decode rejects unusable solutions") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(1, {0.0}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    b.model.add_row("force_on", b.steps[0].on, Sense::eq, 1.0);
    auto sol = milp::solve_tiny(b.model, b.p.tol);
    REQUIRE(sol.status == milp::SolveStatus::infeasible);
    CHECK_THROWS_AS(decode(b, sol), ValidationError);

    auto s2 = scen(1, {f.p.op.aux_base_power}, Mode::standby);
    auto b2 = build_full_model(s2, f.p, params::builtin_scheme("scheme3"));
    auto sol2 = milp::solve_tiny(b2.model, b2.p.tol);
    REQUIRE(sol2.status == milp::SolveStatus::optimal);
    sol2.values[static_cast<size_t>(b2.steps[0].off.id)] = 1.0;  // two states at once
    bool threw_internal = false;
    try {
        decode(b2, sol2);
    } catch (const Error& e) {
        threw_internal = e.kind == Error::Kind::internal;
    }
    CHECK(threw_internal);
}

TEST_CASE("verification flags corrupted records at the right step") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sch = solve_and_decode(b, b.p);

    auto clean = verify_schedule(sch, s, b.p);
    CHECK(clean.max_asr_dev < 1.0);

    auto broken = sch;
    broken.steps[1].hs_level = 10.0;
    auto rep = verify_schedule(broken, s, b.p);
    CHECK(rep.hs_residual == Approx(10.0).epsilon(1e-9));
    CHECK(rep.hs_worst_step == 1);

    auto warm = sch;
    warm.steps[0].asr_temp += 5.0;
    auto rep2 = verify_schedule(warm, s, b.p);
    CHECK(rep2.max_asr_dev >= 4.0);
    CHECK(rep2.asr_worst_step == 0);

    Schedule empty;
    CHECK(verify_schedule(empty, s, b.p).empty);
}

TEST_CASE("salt tank bookkeeping survives schemes without a tank") {
    Fixture f;
    auto s = scen(1, {5.0e6}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme2"));
    auto sch = solve_and_decode(b, b.p);

    CHECK(sch.steps[0].mode == Mode::standby);
    CHECK(!sch.steps[0].ms_on);
    CHECK(sch.steps[0].ms_heat_duty == 0);
    CHECK(sch.steps[0].ms_heater_power == 0);
    // The startup heater carries the hold; the tank just cools on the books.
    double loss = thermal::asr_heat_loss(733, 288, f.t);
    CHECK(sch.steps[0].suh_heat_duty == Approx(loss).epsilon(1e-9));
    CHECK(sch.steps[0].asr_temp == Approx(733).epsilon(1e-9));
    double rvc = thermal::ms_capacitance(f.t);
    double expect_ms = 810 - s.dt / rvc * thermal::ms_heat_loss(810, 288, f.t);
    CHECK(sch.steps[0].ms_temp == Approx(expect_ms).epsilon(1e-9));

    auto rep = verify_schedule(sch, s, b.p);
    CHECK(rep.max_ms_dev < 0.01);
}

TEST_CASE("schedule CSV round trip is value-exact") {
    Fixture f;
    f.p.op.grid_import_max = 0;
    auto s = scen(2, {2.6e8, 4.0e6}, Mode::standby);
    auto b = build_full_model(s, f.p, params::builtin_scheme("scheme3"));
    auto sch = solve_and_decode(b, b.p);

    std::string csv = schedule_to_csv(sch);
    auto back = schedule_from_csv(csv, "roundtrip");
    REQUIRE(back.steps.size() == sch.steps.size());
    CHECK(back.dt == sch.dt);
    for (size_t i = 0; i < sch.steps.size(); ++i) {
        const auto& a = sch.steps[i];
        const auto& c = back.steps[i];
        CHECK(a.mode == c.mode);
        CHECK(a.startup == c.startup);
        CHECK(a.shutdown == c.shutdown);
        CHECK(a.inoff == c.inoff);
        CHECK(a.outoff == c.outoff);
        CHECK(a.ms_on == c.ms_on);
        CHECK(a.load == c.load);
        CHECK(a.h2_production == c.h2_production);
        CHECK(a.h2_to_as == c.h2_to_as);
        CHECK(a.hs_level == c.hs_level);
        CHECK(a.bes_energy == c.bes_energy);
        CHECK(a.bes_charge == c.bes_charge);
        CHECK(a.bes_discharge == c.bes_discharge);
        CHECK(a.grid_import == c.grid_import);
        CHECK(a.ms_heat_duty == c.ms_heat_duty);
        CHECK(a.suh_heat_duty == c.suh_heat_duty);
        CHECK(a.cooling_duty == c.cooling_duty);
        CHECK(a.ms_heater_power == c.ms_heater_power);
        CHECK(a.suh_power == c.suh_power);
        CHECK(a.asr_temp == c.asr_temp);
        CHECK(a.ms_temp == c.ms_temp);
        CHECK(a.aux_power == c.aux_power);
        CHECK(a.nh3_output == c.nh3_output);
    }

    auto cut = csv.find(",ms_temp_K");
    REQUIRE(cut != std::string::npos);
    std::string maimed = csv.substr(0, cut) + csv.substr(csv.find('\n', cut));
    CHECK_THROWS_AS(schedule_from_csv(maimed, "maimed"), ParseError);
}
