#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "p2a/util.hpp"

// Parameter model for the power-to-ammonia scheduling engine.
//
// Internal canonical units are SI throughout: W, J, K, s, kg, plus the trade
// units kept by convention (Nm3 for hydrogen volumes, t for ammonia mass,
// CNY for money). Hourly flow constants (kg/h, Nm3/h, t/h) are stored in
// their per-hour form and divided by 3600 wherever they enter a power
// balance. Config files attach an explicit unit suffix to every key and are
// normalized to the canonical unit on load (idempotent; serialization always
// emits canonical suffixes).

namespace p2a::params {

// Ammonia-synthesis plant state. Order matters: it indexes the transition matrix.
enum class Mode { shutdown = 0, cold_start = 1, production = 2, standby = 3 };
inline constexpr int kNumModes = 4;

const char* mode_name(Mode m);
Mode mode_from_string(const std::string& s);

struct ThermalParams {
    double asr_capacitance;       // J/K, lumped reactor (shell + internals + catalyst)
    double asr_loss_resistance;   // K/W, reactor to ambient
    double ms_loss_resistance;    // K/W, salt tank to ambient
    double ms_density;            // kg/m3
    double ms_specific_heat;      // J/(kg K)
    double ms_volume;             // m3
    double reaction_heat_coeff;   // W at unit load; heat release is coeff * load
    double rig_specific_heat;     // J/(kg K), reactor inlet gas
    double rog_specific_heat;     // J/(kg K), reactor outlet gas (production composition)
    double rig_temp_production;   // K, inlet gas temperature in production
    double rog_temp_production;   // K, outlet gas temperature in production
    double rig_temp_standby;      // K, controlled recycle temperature in standby/cold start
    double ms_approach_gap;       // K, salt-to-gas approach in the exchanger
    double ambient_temp;          // K, default ambient when the scenario gives none
};

struct TransitionMatrix {
    // allowed[from][to], indexed by Mode.
    std::array<std::array<bool, kNumModes>, kNumModes> allowed;
    bool operator==(const TransitionMatrix&) const = default;
};

TransitionMatrix transition_from_string(const std::string& dsl);
std::string transition_to_string(const TransitionMatrix& m);

struct OperationalParams {
    double load_min;              // - (fraction of rated)
    double load_max;              // -
    double ramp_up;               // 1/h
    double ramp_down;             // 1/h (magnitude)
    double asr_temp_act_min;      // K, production gate
    double asr_temp_act_max;      // K, reactor ceiling
    double ms_temp_min;           // K, salt freeze guard
    double ms_temp_max;           // K
    double cooling_duty_max;      // W
    double ms_heat_duty_max;      // W, exchanger duty cap
    double suh_heat_duty_max;     // W
    double ms_heater_power_max;   // W electric
    double suh_power_max;         // W electric
    double ms_exchanger_eff;      // -, tank heat to gas duty
    double ms_heater_eff;         // -, electric power to stored heat
    double suh_eff;               // -, electric power to gas duty
    double rig_flow_intercept;    // kg/h, inlet flow at zero load (production line fit)
    double rig_flow_slope;        // kg/h per unit load
    double rig_flow_standby;      // kg/h
    double h2_consumption_rated;  // Nm3/h at unit load
    double nh3_rate_rated;        // t/h at unit load
    double hp_specific_power;     // Wh/Nm3, electrolyzer
    double hp_flow_max;           // Nm3/h
    double hs_min;                // Nm3
    double hs_max;                // Nm3
    double bes_energy_min;        // J
    double bes_energy_max;        // J
    double bes_charge_max;        // W
    double bes_discharge_max;     // W
    double aux_base_power;        // W while the plant is not shut down
    double aux_load_coeff;        // W per unit load
    double grid_import_max;       // W
    TransitionMatrix transitions;
};

struct ComponentCost {
    std::string name;
    double unit_cost;   // CNY per capacity unit (documented basis per component)
    double capacity;    // in the component's basis unit
    double life_years;
    double om_ratio;    // fraction of investment per year
};

struct EconomicParams {
    double nh3_price;       // CNY/t
    double grid_price;      // CNY/Wh
    double startup_cost;    // CNY, charged per enter-shutdown event
    double discount_rate;   // -
    double weight_profit;   // objective weight on net revenue
    double weight_temp;     // objective weight on summed |T - setpoint|, CNY/K
    double temp_setpoint;   // K
    bool temp_penalty_quadratic;  // emit quadratic deviation term instead of the L1 epigraph
    std::vector<ComponentCost> component_costs;
};

struct SolverTolerances {
    double feasibility = 1e-6;
    double integrality = 1e-6;
    double lp = 1e-7;
    double big_m_scale = 1.0;  // multiplies every computed big-M (robustness knob)
};

struct ParamSet {
    ThermalParams thermal;
    OperationalParams op;
    EconomicParams econ;
    SolverTolerances tol;
};

ParamSet defaults();
void validate(const ParamSet& p);  // throws ValidationError naming the offending field

// Config: flat key=value file with unit suffixes; unknown keys are errors.
ParamSet load_config(const std::string& path);
void apply_config(ParamSet& p, const KvFile& kv, bool validate_after = true);
std::string save_config(const ParamSet& p);  // canonical SI keys, value-exact round trip

// Capital/O&M helpers.
double capital_recovery_factor(double rate, double life_years);
// Day-prorated annualized investment + O&M for a horizon of `days`.
double capex_om_cost(const EconomicParams& econ, double days);

// Stoichiometric heat-release oracle: t/h of ammonia -> W of reaction heat at
// that rate (molar mass 0.017 kg/mol, 46.1 kJ/mol exothermic).
double stoichiometric_reaction_heat(double nh3_t_per_h);

// Vessel geometry for thermal parameter estimation. Masses/heats feed the
// capacitance estimate; walls, insulation and areas feed the loss resistance.
struct ReactorGeometry {
    double shell_mass, shell_specific_heat;          // kg, J/(kg K)
    double internals_mass, internals_specific_heat;  // kg, J/(kg K)
    double catalyst_mass, catalyst_specific_heat;    // kg, J/(kg K)
    double wall_thickness, wall_conductivity;        // m, W/(m K)
    double insulation_thickness, insulation_conductivity;
    double side_wall_area, end_wall_area;            // m2 (single end)
    double side_insulation_area, end_insulation_area;
};

double estimate_capacitance(const ReactorGeometry& g);      // J/K
double estimate_loss_resistance(const ReactorGeometry& g);  // K/W, side path parallel to two ends

// Geometry file holds two vessels under `asr_` and `tank_` prefixes.
struct GeometrySet {
    ReactorGeometry asr;
    ReactorGeometry tank;
};
GeometrySet load_geometry(const std::string& path);

// Storage configuration under comparison (capacities of the three buffers).
struct StorageScheme {
    std::string name;
    bool has_bes = false;
    double bes_energy = 0;   // J
    double bes_power = 0;    // W, symmetric charge/discharge cap
    bool has_hs = false;
    double hs_capacity = 0;  // Nm3 gross; working band is 10..90%
    bool has_mstes = false;
    double ms_volume = 0;    // m3
};

StorageScheme builtin_scheme(const std::string& name);  // scheme1..scheme5, none
std::vector<StorageScheme> builtin_schemes();           // the five comparison schemes

// Time series driving one optimization run.
struct ScenarioProfile {
    double dt = 3600;  // s
    int horizon_steps = 0;
    std::vector<double> wind;     // W, per step
    std::vector<double> pv;       // W, per step
    std::vector<double> ambient;  // K; scalar default expanded lazily (may be size 1)
    double initial_asr_temp = 0;  // K
    double initial_ms_temp = 0;   // K
    Mode initial_mode = Mode::shutdown;
    double initial_load = 0;      // meaningful when initial_mode == production
    // Storage initial levels: fractional specs resolve against the effective
    // working band at model build; absolute values are used verbatim.
    std::optional<double> initial_bes_energy;  // J
    std::optional<double> initial_hs_level;    // Nm3
    double initial_bes_frac = 0.5;             // of working band
    double initial_hs_frac = 0.5;
};

double ambient_at(const ScenarioProfile& s, int step);
ScenarioProfile load_scenario(const std::string& csv_path, const std::string& sidecar_path);
void validate_scenario(const ScenarioProfile& s);

// Hydrogen mass per normal cubic metre, used for storage cost bases.
inline constexpr double kH2KgPerNm3 = 0.08988;
// Thermal storage capacity basis: kWh held by one m3 of salt across the band.
double mstes_kwh_per_m3(const ThermalParams& t, const OperationalParams& op);

}  // namespace p2a::params
