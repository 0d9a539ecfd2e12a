#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "p2a/thermal.hpp"

using namespace p2a;
using namespace p2a::thermal;
using params::Mode;

namespace {

struct Fixture {
    params::ParamSet p = params::defaults();
    const params::ThermalParams& t = p.thermal;
    const params::OperationalParams& op = p.op;
};

}  // namespace

TEST_CASE("reactor loss at operating point") {
    Fixture f;
    // (733 - 288) / 0.0052
    CHECK(asr_heat_loss(733, 288, f.t) == doctest::Approx(85576.923).epsilon(1e-6));
    CHECK(asr_heat_loss(288, 288, f.t) == 0);
    CHECK(ms_heat_loss(810, 288, f.t) == doctest::Approx((810 - 288) / 0.0535).epsilon(1e-12));
}

TEST_CASE("reaction heat is linear in load") {
    Fixture f;
    CHECK(reaction_heat(1.0, f.t) == f.t.reaction_heat_coeff);
    CHECK(reaction_heat(0.5, f.t) == doctest::Approx(0.5 * f.t.reaction_heat_coeff).epsilon(1e-15));
    CHECK(reaction_heat(0.0, f.t) == 0);
}

TEST_CASE("gas enthalpy: production line fit, recycle cancellation") {
    Fixture f;
    double expect_l1 = (62661.43 + 13368.0) / 3600.0 *
                       (3461.0 * 416.15 - 3297.0 * 663.55);
    CHECK(gas_enthalpy_net(Mode::production, 1.0, f.t, f.op) ==
          doctest::Approx(expect_l1).epsilon(1e-12));
    CHECK(expect_l1 < -1.5e7);  // strongly endothermic through-flow at rated load
    CHECK(gas_enthalpy_net(Mode::standby, 0, f.t, f.op) == 0);
    CHECK(gas_enthalpy_net(Mode::cold_start, 0, f.t, f.op) == 0);
    CHECK(gas_enthalpy_net(Mode::shutdown, 0, f.t, f.op) == 0);
}

TEST_CASE("production heat balance crosses zero inside the load band") {
    Fixture f;
    auto net = [&](double load) {
        return reaction_heat(load, f.t) + gas_enthalpy_net(Mode::production, load, f.t, f.op);
    };
    CHECK(net(f.op.load_min) < 0);  // low load cannot self-sustain
    CHECK(net(1.0) > 0);            // rated load runs hot and needs cooling headroom
    CHECK(net(1.0) < f.op.cooling_duty_max);
}

TEST_CASE("standby duty equal to the loss holds temperature exactly") {
    Fixture f;
    Drives d;
    d.mode = Mode::standby;
    d.q_ms = asr_heat_loss(733, 288, f.t);
    StepResult s = integrate_step(733, 810, 288, 3600, d, f.t, f.op);
    CHECK(s.asr_temp == doctest::Approx(733).epsilon(1e-12));
}

TEST_CASE("one idle standby hour drops about 1.6 K") {
    Fixture f;
    Drives d;
    d.mode = Mode::standby;
    StepResult fine = integrate_step(733, 810, 288, 3600, d, f.t, f.op, 60);
    StepResult coarse = integrate_step(733, 810, 288, 3600, d, f.t, f.op, 3600);
    CHECK(733 - fine.asr_temp == doctest::Approx(1.6033).epsilon(1e-3));
    CHECK(733 - coarse.asr_temp == doctest::Approx(1.60624).epsilon(1e-4));
    CHECK(std::abs(fine.asr_temp - coarse.asr_temp) < 0.01);
}

TEST_CASE("free decay matches the closed-form exponential at one time constant") {
    Fixture f;
    double rc = f.t.asr_loss_resistance * f.t.asr_capacitance;
    CHECK(rc == doctest::Approx(997360.0).epsilon(1e-9));
    Drives d;  // shutdown, everything off
    double expect = 288.0 + (733.0 - 288.0) / std::exp(1.0);
    StepResult s = integrate_step(733, 810, 288, rc, d, f.t, f.op, 60);
    CHECK(s.asr_temp == doctest::Approx(expect).epsilon(0.5 / expect));
    CHECK(std::abs(s.asr_temp - 451.7057) < 0.5);
}

TEST_CASE("full-power tank heater raises the salt about 185 K per hour") {
    Fixture f;
    Drives d;
    d.mode = Mode::standby;
    d.p_ms_heater = f.op.ms_heater_power_max;
    // at ambient the loss term vanishes, isolating the heater path
    CHECK(ms_derivative(288, 288, d, f.t, f.op) * 3600 == doctest::Approx(185.12).epsilon(1e-3));
    // exchanger duty drains the tank through the exchanger efficiency
    d.p_ms_heater = 0;
    d.q_ms = 9e5;
    CHECK(ms_derivative(288, 288, d, f.t, f.op) * 3600 ==
          doctest::Approx(-1e6 * 3600 / ms_capacitance(f.t)).epsilon(1e-9));
}

TEST_CASE("substep cap at dt reduces to a single explicit step") {
    Fixture f;
    Drives d;
    d.mode = Mode::production;
    d.load = 0.8;
    d.q_cool = 1e6;
    StepResult one = integrate_step(700, 600, 288, 900, d, f.t, f.op, 900);
    double expect = 700 + 900 * asr_derivative(700, 288, d, f.t, f.op);
    CHECK(one.asr_temp == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("replay walks the ambient series and reports end-of-step temperatures") {
    Fixture f;
    params::ScenarioProfile sc;
    sc.dt = 3600;
    sc.horizon_steps = 3;
    sc.wind = {0, 0, 0};
    sc.pv = {0, 0, 0};
    sc.ambient = {288, 300, 310};
    sc.initial_asr_temp = 733;
    sc.initial_ms_temp = 810;

    std::vector<Drives> steps(3);
    for (auto& d : steps) d.mode = Mode::standby;
    Trajectory tr = replay(steps, sc, 733, 810, f.t, f.op);
    REQUIRE(tr.asr_temp.size() == 3);
    REQUIRE(tr.ms_temp.size() == 3);
    // warmer ambient slows the sag step by step
    double d0 = 733 - tr.asr_temp[0];
    double d1 = tr.asr_temp[0] - tr.asr_temp[1];
    double d2 = tr.asr_temp[1] - tr.asr_temp[2];
    CHECK(d0 > d1);
    CHECK(d1 > d2);
    CHECK(tr.ms_temp[2] < 810);

    StepResult manual = integrate_step(733, 810, 288, 3600, steps[0], f.t, f.op);
    CHECK(tr.asr_temp[0] == doctest::Approx(manual.asr_temp).epsilon(1e-15));
}

TEST_CASE("integration rejects non-positive step sizes") {
    Fixture f;
    Drives d;
    CHECK_THROWS_AS(integrate_step(733, 810, 288, 0, d, f.t, f.op), ValidationError);
    CHECK_THROWS_AS(integrate_step(733, 810, 288, 3600, d, f.t, f.op, 0), ValidationError);
}
