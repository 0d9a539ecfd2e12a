#include "p2a/thermal.hpp"

#include <cmath>

namespace p2a::thermal {

using params::Mode;

double reaction_heat(double load, const params::ThermalParams& t) {
    return t.reaction_heat_coeff * load;
}

double asr_heat_loss(double asr_temp, double ambient, const params::ThermalParams& t) {
    return (asr_temp - ambient) / t.asr_loss_resistance;
}

double ms_heat_loss(double ms_temp, double ambient, const params::ThermalParams& t) {
    return (ms_temp - ambient) / t.ms_loss_resistance;
}

double gas_enthalpy_net(Mode mode, double load, const params::ThermalParams& t,
                        const params::OperationalParams& op) {
    switch (mode) {
        case Mode::production: {
            double flow = (op.rig_flow_intercept + op.rig_flow_slope * load) / 3600.0;  // kg/s
            return flow * (t.rig_specific_heat * t.rig_temp_production -
                           t.rog_specific_heat * t.rog_temp_production);
        }
        case Mode::standby:
        case Mode::cold_start:
            // Controlled recycle: the return stream re-enters at the supply
            // temperature and composition, so the through-flow terms cancel
            // and only heater duties act on the lump.
            return 0.0;
        case Mode::shutdown:
            return 0.0;
    }
    return 0.0;
}

double ms_capacitance(const params::ThermalParams& t) {
    return t.ms_density * t.ms_specific_heat * t.ms_volume;
}

double asr_derivative(double asr_temp, double ambient, const Drives& d,
                      const params::ThermalParams& t, const params::OperationalParams& op) {
    double load = d.mode == Mode::production ? d.load : 0.0;
    double q = reaction_heat(load, t) + gas_enthalpy_net(d.mode, load, t, op) + d.q_ms + d.q_su -
               d.q_cool - asr_heat_loss(asr_temp, ambient, t);
    return q / t.asr_capacitance;
}

double ms_derivative(double ms_temp, double ambient, const Drives& d,
                     const params::ThermalParams& t, const params::OperationalParams& op) {
    double q = op.ms_heater_eff * d.p_ms_heater - d.q_ms / op.ms_exchanger_eff -
               ms_heat_loss(ms_temp, ambient, t);
    return q / ms_capacitance(t);
}

StepResult integrate_step(double asr_temp, double ms_temp, double ambient, double dt,
                          const Drives& d, const params::ThermalParams& t,
                          const params::OperationalParams& op, double max_substep) {
    if (!(dt > 0)) throw ValidationError("dt", "must be positive");
    if (!(max_substep > 0)) throw ValidationError("max_substep", "must be positive");
    int n = static_cast<int>(std::ceil(dt / max_substep));
    if (n < 1) n = 1;
    double h = dt / n;
    StepResult s{asr_temp, ms_temp};
    for (int i = 0; i < n; ++i) {
        double da = asr_derivative(s.asr_temp, ambient, d, t, op);
        double dm = ms_derivative(s.ms_temp, ambient, d, t, op);
        s.asr_temp += h * da;
        s.ms_temp += h * dm;
    }
    return s;
}

Trajectory replay(const std::vector<Drives>& steps, const params::ScenarioProfile& scenario,
                  double initial_asr_temp, double initial_ms_temp,
                  const params::ThermalParams& t, const params::OperationalParams& op,
                  double max_substep) {
    Trajectory out;
    out.asr_temp.reserve(steps.size());
    out.ms_temp.reserve(steps.size());
    double asr = initial_asr_temp;
    double ms = initial_ms_temp;
    for (size_t i = 0; i < steps.size(); ++i) {
        double ambient = params::ambient_at(scenario, static_cast<int>(i));
        StepResult s =
            integrate_step(asr, ms, ambient, scenario.dt, steps[i], t, op, max_substep);
        asr = s.asr_temp;
        ms = s.ms_temp;
        out.asr_temp.push_back(asr);
        out.ms_temp.push_back(ms);
    }
    return out;
}

}  // namespace p2a::thermal
