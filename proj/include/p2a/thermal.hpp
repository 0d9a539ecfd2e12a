#pragma once

#include <vector>

#include "p2a/params.hpp"

// Continuous-time lumped thermal model of the synthesis reactor and the salt
// tank. This is the reference physics: the scheduler's discretized rows are
// checked against integration done here at fine substeps.

namespace p2a::thermal {

// Heater/cooler commands applied over one scheduling step (zero-order hold).
struct Drives {
    params::Mode mode = params::Mode::shutdown;
    double load = 0;         // fraction of rated, nonzero only in production
    double q_ms = 0;         // W, heat delivered to the gas from the salt loop
    double q_su = 0;         // W, heat delivered by the startup heater
    double q_cool = 0;       // W, removed by the cooling train
    double p_ms_heater = 0;  // W electric into the tank heater
};

// Exothermic release at a given load fraction; zero when not producing.
double reaction_heat(double load, const params::ThermalParams& t);

// Conduction loss of the reactor lump to ambient.
double asr_heat_loss(double asr_temp, double ambient, const params::ThermalParams& t);
// Conduction loss of the salt lump to ambient.
double ms_heat_loss(double ms_temp, double ambient, const params::ThermalParams& t);

// Net enthalpy the through-flow carries into the reactor, excluding heater
// duties. Production runs the inlet/outlet line fit at the given load;
// standby and cold start circulate a temperature-controlled recycle whose
// supply and return streams cancel; shutdown has no flow.
double gas_enthalpy_net(params::Mode mode, double load, const params::ThermalParams& t,
                        const params::OperationalParams& op);

// Lumped heat capacity of the salt inventory, J/K.
double ms_capacitance(const params::ThermalParams& t);

// dT/dt of each lump under the given drives.
double asr_derivative(double asr_temp, double ambient, const Drives& d,
                      const params::ThermalParams& t, const params::OperationalParams& op);
double ms_derivative(double ms_temp, double ambient, const Drives& d,
                     const params::ThermalParams& t, const params::OperationalParams& op);

struct StepResult {
    double asr_temp;
    double ms_temp;
};

// Integrates both lumps across dt seconds of constant drives, using explicit
// substeps no longer than max_substep seconds.
StepResult integrate_step(double asr_temp, double ms_temp, double ambient, double dt,
                          const Drives& d, const params::ThermalParams& t,
                          const params::OperationalParams& op, double max_substep = 60.0);

struct Trajectory {
    std::vector<double> asr_temp;  // temperature at the end of each step
    std::vector<double> ms_temp;
};

// Replays a full drive sequence against the scenario's ambient series.
Trajectory replay(const std::vector<Drives>& steps, const params::ScenarioProfile& scenario,
                  double initial_asr_temp, double initial_ms_temp,
                  const params::ThermalParams& t, const params::OperationalParams& op,
                  double max_substep = 60.0);

}  // namespace p2a::thermal
