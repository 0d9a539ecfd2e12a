#include "p2a/params.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <sstream>

namespace p2a::params {

namespace {

constexpr double kNh3MolarMass = 0.017;   // kg/mol
constexpr double kReactionEnthalpy = 46100.0;  // J/mol released
constexpr double kCelsiusOffset = 273.15;

struct UnitOption {
    const char* suffix;  // appended to the base key after '_'; "" means bare key
    double scale;
    double offset;
};

struct UnitFamily {
    const char* canonical;  // suffix emitted by save_config
    std::vector<UnitOption> options;
};

const UnitFamily& fam_temp() {
    static const UnitFamily f{"K", {{"K", 1, 0}, {"C", 1, kCelsiusOffset}}};
    return f;
}
const UnitFamily& fam_temp_diff() {
    static const UnitFamily f{"K", {{"K", 1, 0}}};
    return f;
}
const UnitFamily& fam_power() {
    static const UnitFamily f{"W", {{"W", 1, 0}, {"kW", 1e3, 0}, {"MW", 1e6, 0}}};
    return f;
}
const UnitFamily& fam_energy() {
    static const UnitFamily f{"J", {{"J", 1, 0}, {"kWh", 3.6e6, 0}, {"MWh", 3.6e9, 0}}};
    return f;
}
const UnitFamily& fam_heat_capacity() {
    static const UnitFamily f{"J_per_K", {{"J_per_K", 1, 0}, {"kJ_per_K", 1e3, 0}, {"MJ_per_K", 1e6, 0}}};
    return f;
}
const UnitFamily& fam_resistance() {
    static const UnitFamily f{"K_per_W", {{"K_per_W", 1, 0}, {"K_per_kW", 1e-3, 0}}};
    return f;
}
const UnitFamily& fam_specific_heat() {
    static const UnitFamily f{"J_per_kgK", {{"J_per_kgK", 1, 0}}};
    return f;
}
const UnitFamily& fam_density() {
    static const UnitFamily f{"kg_per_m3", {{"kg_per_m3", 1, 0}}};
    return f;
}
const UnitFamily& fam_volume() {
    static const UnitFamily f{"m3", {{"m3", 1, 0}}};
    return f;
}
const UnitFamily& fam_mass_flow() {
    static const UnitFamily f{"kg_per_h", {{"kg_per_h", 1, 0}, {"t_per_h", 1e3, 0}}};
    return f;
}
const UnitFamily& fam_gas_flow() {
    static const UnitFamily f{"Nm3_per_h", {{"Nm3_per_h", 1, 0}}};
    return f;
}
const UnitFamily& fam_gas_volume() {
    static const UnitFamily f{"Nm3", {{"Nm3", 1, 0}}};
    return f;
}
const UnitFamily& fam_nh3_rate() {
    static const UnitFamily f{"t_per_h", {{"t_per_h", 1, 0}}};
    return f;
}
const UnitFamily& fam_energy_per_gas() {
    static const UnitFamily f{"Wh_per_Nm3", {{"Wh_per_Nm3", 1, 0}, {"kWh_per_Nm3", 1e3, 0}}};
    return f;
}
const UnitFamily& fam_price_energy() {
    static const UnitFamily f{"CNY_per_Wh", {{"CNY_per_Wh", 1, 0}, {"CNY_per_kWh", 1e-3, 0}}};
    return f;
}
const UnitFamily& fam_price_mass() {
    static const UnitFamily f{"CNY_per_t", {{"CNY_per_t", 1, 0}}};
    return f;
}
const UnitFamily& fam_money() {
    static const UnitFamily f{"CNY", {{"CNY", 1, 0}}};
    return f;
}
const UnitFamily& fam_money_per_K() {
    static const UnitFamily f{"CNY_per_K", {{"CNY_per_K", 1, 0}}};
    return f;
}
const UnitFamily& fam_bare() {
    static const UnitFamily f{"", {{"", 1, 0}}};
    return f;
}
const UnitFamily& fam_per_hour() {
    static const UnitFamily f{"per_h", {{"per_h", 1, 0}}};
    return f;
}

struct FieldSpec {
    const char* base;
    double* target;
    const UnitFamily* family;
};

std::vector<FieldSpec> field_table(ParamSet& p) {
    auto& t = p.thermal;
    auto& o = p.op;
    auto& e = p.econ;
    auto& s = p.tol;
    return {
        {"asr_capacitance", &t.asr_capacitance, &fam_heat_capacity()},
        {"asr_loss_resistance", &t.asr_loss_resistance, &fam_resistance()},
        {"ms_loss_resistance", &t.ms_loss_resistance, &fam_resistance()},
        {"ms_density", &t.ms_density, &fam_density()},
        {"ms_specific_heat", &t.ms_specific_heat, &fam_specific_heat()},
        {"ms_volume", &t.ms_volume, &fam_volume()},
        {"reaction_heat_coeff", &t.reaction_heat_coeff, &fam_power()},
        {"rig_specific_heat", &t.rig_specific_heat, &fam_specific_heat()},
        {"rog_specific_heat", &t.rog_specific_heat, &fam_specific_heat()},
        {"rig_temp_production", &t.rig_temp_production, &fam_temp()},
        {"rog_temp_production", &t.rog_temp_production, &fam_temp()},
        {"rig_temp_standby", &t.rig_temp_standby, &fam_temp()},
        {"ms_approach_gap", &t.ms_approach_gap, &fam_temp_diff()},
        {"ambient_temp", &t.ambient_temp, &fam_temp()},

        {"load_min", &o.load_min, &fam_bare()},
        {"load_max", &o.load_max, &fam_bare()},
        {"ramp_up", &o.ramp_up, &fam_per_hour()},
        {"ramp_down", &o.ramp_down, &fam_per_hour()},
        {"asr_temp_act_min", &o.asr_temp_act_min, &fam_temp()},
        {"asr_temp_act_max", &o.asr_temp_act_max, &fam_temp()},
        {"ms_temp_min", &o.ms_temp_min, &fam_temp()},
        {"ms_temp_max", &o.ms_temp_max, &fam_temp()},
        {"cooling_duty_max", &o.cooling_duty_max, &fam_power()},
        {"ms_heat_duty_max", &o.ms_heat_duty_max, &fam_power()},
        {"suh_heat_duty_max", &o.suh_heat_duty_max, &fam_power()},
        {"ms_heater_power_max", &o.ms_heater_power_max, &fam_power()},
        {"suh_power_max", &o.suh_power_max, &fam_power()},
        {"ms_exchanger_eff", &o.ms_exchanger_eff, &fam_bare()},
        {"ms_heater_eff", &o.ms_heater_eff, &fam_bare()},
        {"suh_eff", &o.suh_eff, &fam_bare()},
        {"rig_flow_intercept", &o.rig_flow_intercept, &fam_mass_flow()},
        {"rig_flow_slope", &o.rig_flow_slope, &fam_mass_flow()},
        {"rig_flow_standby", &o.rig_flow_standby, &fam_mass_flow()},
        {"h2_consumption_rated", &o.h2_consumption_rated, &fam_gas_flow()},
        {"nh3_rate_rated", &o.nh3_rate_rated, &fam_nh3_rate()},
        {"hp_specific_power", &o.hp_specific_power, &fam_energy_per_gas()},
        {"hp_flow_max", &o.hp_flow_max, &fam_gas_flow()},
        {"hs_min", &o.hs_min, &fam_gas_volume()},
        {"hs_max", &o.hs_max, &fam_gas_volume()},
        {"bes_energy_min", &o.bes_energy_min, &fam_energy()},
        {"bes_energy_max", &o.bes_energy_max, &fam_energy()},
        {"bes_charge_max", &o.bes_charge_max, &fam_power()},
        {"bes_discharge_max", &o.bes_discharge_max, &fam_power()},
        {"aux_base_power", &o.aux_base_power, &fam_power()},
        {"aux_load_coeff", &o.aux_load_coeff, &fam_power()},
        {"grid_import_max", &o.grid_import_max, &fam_power()},

        {"nh3_price", &e.nh3_price, &fam_price_mass()},
        {"grid_price", &e.grid_price, &fam_price_energy()},
        {"startup_cost", &e.startup_cost, &fam_money()},
        {"discount_rate", &e.discount_rate, &fam_bare()},
        {"weight_profit", &e.weight_profit, &fam_bare()},
        {"weight_temp", &e.weight_temp, &fam_money_per_K()},
        {"temp_setpoint", &e.temp_setpoint, &fam_temp()},

        {"tol_feasibility", &s.feasibility, &fam_bare()},
        {"tol_integrality", &s.integrality, &fam_bare()},
        {"tol_lp", &s.lp, &fam_bare()},
        {"big_m_scale", &s.big_m_scale, &fam_bare()},
    };
}

std::string join_key(const char* base, const char* suffix) {
    std::string k = base;
    if (suffix[0] != '\0') {
        k += '_';
        k += suffix;
    }
    return k;
}

void require_positive(double v, const char* field) {
    if (!(v > 0) || !std::isfinite(v))
        throw ValidationError(field, "must be a positive finite number");
}

void require_nonneg(double v, const char* field) {
    if (!(v >= 0) || !std::isfinite(v))
        throw ValidationError(field, "must be a non-negative finite number");
}

void require_fraction(double v, const char* field) {
    if (!(v > 0) || !(v <= 1))
        throw ValidationError(field, "must lie in (0, 1]");
}

const char* kComponentFields[] = {"unit_cost_CNY", "capacity", "life_years", "om_ratio"};

}  // namespace

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::shutdown: return "shutdown";
        case Mode::cold_start: return "cold_start";
        case Mode::production: return "production";
        case Mode::standby: return "standby";
    }
    throw Error(Error::Kind::internal, "invalid mode value");
}

Mode mode_from_string(const std::string& s) {
    if (s == "shutdown" || s == "off") return Mode::shutdown;
    if (s == "cold_start" || s == "cs") return Mode::cold_start;
    if (s == "production" || s == "on") return Mode::production;
    if (s == "standby" || s == "by") return Mode::standby;
    throw ValidationError("mode", "unknown mode '" + s + "'");
}

TransitionMatrix transition_from_string(const std::string& dsl) {
    TransitionMatrix m{};
    for (auto& row : m.allowed) row.fill(false);
    std::array<bool, kNumModes> seen{};
    for (const std::string& clause : split(dsl, ';')) {
        std::string c = trim(clause);
        if (c.empty()) continue;
        auto colon = c.find(':');
        if (colon == std::string::npos)
            throw ValidationError("transition_matrix", "clause '" + c + "' lacks ':'");
        Mode from = mode_from_string(trim(c.substr(0, colon)));
        if (seen[static_cast<int>(from)])
            throw ValidationError("transition_matrix",
                                  std::string("duplicate clause for state ") + mode_name(from));
        seen[static_cast<int>(from)] = true;
        for (const std::string& target : split(c.substr(colon + 1), ',')) {
            std::string t = trim(target);
            if (t.empty()) continue;
            m.allowed[static_cast<int>(from)][static_cast<int>(mode_from_string(t))] = true;
        }
    }
    for (int i = 0; i < kNumModes; ++i) {
        bool any = false;
        for (int j = 0; j < kNumModes; ++j) any = any || m.allowed[i][j];
        if (!any)
            throw ValidationError("transition_matrix",
                                  std::string("state ") + mode_name(static_cast<Mode>(i)) +
                                      " has no allowed successor");
    }
    return m;
}

std::string transition_to_string(const TransitionMatrix& m) {
    std::string out;
    for (int i = 0; i < kNumModes; ++i) {
        if (i) out += ';';
        out += mode_name(static_cast<Mode>(i));
        out += ':';
        bool first = true;
        for (int j = 0; j < kNumModes; ++j) {
            if (!m.allowed[i][j]) continue;
            if (!first) out += ',';
            out += mode_name(static_cast<Mode>(j));
            first = false;
        }
    }
    return out;
}

ParamSet defaults() {
    ParamSet p{};
    auto& t = p.thermal;
    t.asr_capacitance = 1.918e8;
    t.asr_loss_resistance = 0.0052;
    t.ms_loss_resistance = 0.0535;
    t.ms_density = 1924.6;
    t.ms_specific_heat = 1488.0;
    t.ms_volume = 20.0;
    t.reaction_heat_coeff = stoichiometric_reaction_heat(24.9);
    t.rig_specific_heat = 3461.0;
    t.rog_specific_heat = 3297.0;
    t.rig_temp_production = 143.0 + kCelsiusOffset;   // 416.15 K
    t.rog_temp_production = 390.4 + kCelsiusOffset;   // 663.55 K
    t.rig_temp_standby = 600.0;
    t.ms_approach_gap = 15.0;
    t.ambient_temp = 288.0;

    auto& o = p.op;
    o.load_min = 0.3;
    o.load_max = 1.1;
    o.ramp_up = 0.25;
    o.ramp_down = 0.25;
    o.asr_temp_act_min = 693.0;
    o.asr_temp_act_max = 763.0;
    o.ms_temp_min = 280.0 + kCelsiusOffset;  // 553.15 K
    o.ms_temp_max = 565.0 + kCelsiusOffset;  // 838.15 K
    o.cooling_duty_max = 4.1e6;
    o.ms_heat_duty_max = 3.0e6;
    o.suh_heat_duty_max = 1.9e6;
    o.ms_heater_power_max = 3.1e6;
    o.suh_power_max = 2.0e6;
    o.ms_exchanger_eff = 0.9;
    o.ms_heater_eff = 0.95;
    o.suh_eff = 0.95;
    o.rig_flow_intercept = 62661.43;
    o.rig_flow_slope = 13368.0;
    o.rig_flow_standby = 15205.89;
    o.h2_consumption_rated = 49202.4;
    o.nh3_rate_rated = 24.9;
    o.hp_specific_power = 4800.0;
    o.hp_flow_max = 150000.0 / 3.6;  // 41666.67 Nm3/h
    o.hs_min = 1.5e4;
    o.hs_max = 1.35e5;
    o.bes_energy_min = 0.1 * 32.0 * 3.6e9;
    o.bes_energy_max = 0.9 * 32.0 * 3.6e9;
    o.bes_charge_max = 8.0e6;
    o.bes_discharge_max = 8.0e6;
    o.aux_base_power = 3.97e6;
    o.aux_load_coeff = 1.59e7;
    o.grid_import_max = 2.0e7;
    o.transitions = transition_from_string(
        "shutdown:shutdown,cold_start;"
        "cold_start:cold_start,production;"
        "production:production,standby,shutdown;"
        "standby:standby,production,shutdown");

    auto& e = p.econ;
    e.nh3_price = 4200.0;
    e.grid_price = 1.2e-3;
    e.startup_cost = 1.0e5;
    e.discount_rate = 0.08;
    e.weight_profit = 1.0;
    e.weight_temp = 100.0;
    e.temp_setpoint = 733.0;
    e.temp_penalty_quadratic = false;
    e.component_costs = {
        {"wind", 3700.0, 450000.0, 25.0, 0.02},
        {"pv", 3450.0, 150000.0, 25.0, 0.01},
        {"electrolyzer", 500.0, 200000.0, 25.0, 0.02},
        {"ammonia_plant", 1100.0, 200000.0, 25.0, 0.02},
        {"hydrogen_storage", 1750.0, kH2KgPerNm3 * 150000.0, 25.0, 0.01},
        {"bes", 1700.0, 32000.0, 12.0, 0.02},
        {"ms_tes", 150.0, 0.0, 25.0, 0.02},
    };
    // MS-TES cost basis follows the configured tank size and temperature band.
    e.component_costs[6].capacity = mstes_kwh_per_m3(p.thermal, p.op) * t.ms_volume;

    p.tol = SolverTolerances{};
    return p;
}

void validate(const ParamSet& p) {
    const auto& t = p.thermal;
    require_positive(t.asr_capacitance, "asr_capacitance");
    require_positive(t.asr_loss_resistance, "asr_loss_resistance");
    require_positive(t.ms_loss_resistance, "ms_loss_resistance");
    require_positive(t.ms_density, "ms_density");
    require_positive(t.ms_specific_heat, "ms_specific_heat");
    require_positive(t.ms_volume, "ms_volume");
    require_positive(t.reaction_heat_coeff, "reaction_heat_coeff");
    require_positive(t.rig_specific_heat, "rig_specific_heat");
    require_positive(t.rog_specific_heat, "rog_specific_heat");
    require_positive(t.rig_temp_production, "rig_temp_production");
    require_positive(t.rog_temp_production, "rog_temp_production");
    require_positive(t.rig_temp_standby, "rig_temp_standby");
    require_nonneg(t.ms_approach_gap, "ms_approach_gap");
    require_positive(t.ambient_temp, "ambient_temp");
    if (t.rig_temp_standby <= t.rig_temp_production)
        throw ValidationError("rig_temp_standby",
                              "standby recycle temperature must exceed the production inlet temperature");
    if (t.rog_temp_production <= t.rig_temp_production)
        throw ValidationError("rog_temp_production",
                              "outlet temperature must exceed inlet temperature in production");

    const auto& o = p.op;
    if (!(o.load_min > 0) || !(o.load_min < 1))
        throw ValidationError("load_min", "must lie in (0, 1)");
    if (!(o.load_max >= 1))
        throw ValidationError("load_max", "must be at least 1 (rated load)");
    if (!(o.load_min < o.load_max))
        throw ValidationError("load_min", "must be below load_max");
    require_positive(o.ramp_up, "ramp_up");
    require_positive(o.ramp_down, "ramp_down");
    if (!(o.asr_temp_act_min < o.asr_temp_act_max))
        throw ValidationError("asr_temp_act_min", "activation band is empty");
    if (!(o.ms_temp_min < o.ms_temp_max))
        throw ValidationError("ms_temp_min", "salt band is empty");
    if (!(o.asr_temp_act_min > t.ambient_temp))
        throw ValidationError("asr_temp_act_min", "activation temperature must exceed ambient");
    require_nonneg(o.cooling_duty_max, "cooling_duty_max");
    require_nonneg(o.ms_heat_duty_max, "ms_heat_duty_max");
    require_nonneg(o.suh_heat_duty_max, "suh_heat_duty_max");
    require_nonneg(o.ms_heater_power_max, "ms_heater_power_max");
    require_nonneg(o.suh_power_max, "suh_power_max");
    require_fraction(o.ms_exchanger_eff, "ms_exchanger_eff");
    require_fraction(o.ms_heater_eff, "ms_heater_eff");
    require_fraction(o.suh_eff, "suh_eff");
    if (o.suh_heat_duty_max > o.suh_eff * o.suh_power_max * (1 + 1e-12))
        throw ValidationError("suh_heat_duty_max",
                              "exceeds what suh_power_max can deliver at suh_eff");
    require_positive(o.rig_flow_intercept, "rig_flow_intercept");
    require_nonneg(o.rig_flow_slope, "rig_flow_slope");
    require_positive(o.rig_flow_standby, "rig_flow_standby");
    require_positive(o.h2_consumption_rated, "h2_consumption_rated");
    require_positive(o.nh3_rate_rated, "nh3_rate_rated");
    require_positive(o.hp_specific_power, "hp_specific_power");
    require_positive(o.hp_flow_max, "hp_flow_max");
    require_nonneg(o.hs_min, "hs_min");
    if (!(o.hs_min <= o.hs_max))
        throw ValidationError("hs_min", "must not exceed hs_max");
    require_nonneg(o.bes_energy_min, "bes_energy_min");
    if (!(o.bes_energy_min <= o.bes_energy_max))
        throw ValidationError("bes_energy_min", "must not exceed bes_energy_max");
    require_nonneg(o.bes_charge_max, "bes_charge_max");
    require_nonneg(o.bes_discharge_max, "bes_discharge_max");
    require_nonneg(o.aux_base_power, "aux_base_power");
    require_nonneg(o.aux_load_coeff, "aux_load_coeff");
    require_nonneg(o.grid_import_max, "grid_import_max");

    const auto& e = p.econ;
    require_nonneg(e.nh3_price, "nh3_price");
    require_nonneg(e.grid_price, "grid_price");
    require_nonneg(e.startup_cost, "startup_cost");
    if (!(e.discount_rate >= 0) || !(e.discount_rate < 1))
        throw ValidationError("discount_rate", "must lie in [0, 1)");
    require_nonneg(e.weight_profit, "weight_profit");
    require_nonneg(e.weight_temp, "weight_temp");
    if (!(e.temp_setpoint >= o.asr_temp_act_min) || !(e.temp_setpoint <= o.asr_temp_act_max))
        throw ValidationError("temp_setpoint", "must lie inside the activation band");
    for (const auto& c : e.component_costs) {
        std::string prefix = "component_" + c.name + "_";
        require_nonneg(c.unit_cost, (prefix + "unit_cost_CNY").c_str());
        require_nonneg(c.capacity, (prefix + "capacity").c_str());
        require_positive(c.life_years, (prefix + "life_years").c_str());
        require_nonneg(c.om_ratio, (prefix + "om_ratio").c_str());
    }

    require_positive(p.tol.feasibility, "tol_feasibility");
    require_positive(p.tol.integrality, "tol_integrality");
    require_positive(p.tol.lp, "tol_lp");
    require_positive(p.tol.big_m_scale, "big_m_scale");
}

void apply_config(ParamSet& p, const KvFile& kv, bool validate_after) {
    auto fields = field_table(p);
    struct Slot {
        double* target;
        double scale, offset;
        const char* base;
    };
    std::map<std::string, Slot> keymap;
    for (const auto& f : fields)
        for (const auto& u : f.family->options)
            keymap[join_key(f.base, u.suffix)] = Slot{f.target, u.scale, u.offset, f.base};

    std::map<std::string, std::string> assigned_base;  // base field -> key that set it
    for (const auto& entry : kv.entries) {
        const std::string& key = entry.first;
        if (key == "transition_matrix") {
            p.op.transitions = transition_from_string(entry.second);
            continue;
        }
        if (key == "temp_penalty_form") {
            if (entry.second == "l1")
                p.econ.temp_penalty_quadratic = false;
            else if (entry.second == "quadratic")
                p.econ.temp_penalty_quadratic = true;
            else
                throw ValidationError("temp_penalty_form", "must be 'l1' or 'quadratic'");
            continue;
        }
        if (key.rfind("component_", 0) == 0) {
            std::string rest = key.substr(std::strlen("component_"));
            const char* field = nullptr;
            for (const char* f : kComponentFields) {
                std::string suffix = std::string("_") + f;
                if (rest.size() > suffix.size() &&
                    rest.compare(rest.size() - suffix.size(), suffix.size(), suffix) == 0) {
                    field = f;
                    rest = rest.substr(0, rest.size() - suffix.size());
                    break;
                }
            }
            if (!field)
                throw ValidationError(key, "unknown component cost field");
            auto& list = p.econ.component_costs;
            auto it = std::find_if(list.begin(), list.end(),
                                   [&](const ComponentCost& c) { return c.name == rest; });
            if (it == list.end()) {
                list.push_back(ComponentCost{rest, 0, 0, 25.0, 0});
                it = std::prev(list.end());
            }
            double v = parse_double(entry.second, key);
            if (std::strcmp(field, "unit_cost_CNY") == 0) it->unit_cost = v;
            else if (std::strcmp(field, "capacity") == 0) it->capacity = v;
            else if (std::strcmp(field, "life_years") == 0) it->life_years = v;
            else it->om_ratio = v;
            continue;
        }
        auto slot = keymap.find(key);
        if (slot == keymap.end())
            throw ValidationError(key, "unknown config key");
        auto prev = assigned_base.find(slot->second.base);
        if (prev != assigned_base.end())
            throw ValidationError(key, "field already set by key '" + prev->second + "'");
        assigned_base[slot->second.base] = key;
        *slot->second.target =
            parse_double(entry.second, key) * slot->second.scale + slot->second.offset;
    }
    if (validate_after) validate(p);
}

ParamSet load_config(const std::string& path) {
    ParamSet p = defaults();
    apply_config(p, KvFile::parse_file(path));
    return p;
}

std::string save_config(const ParamSet& p) {
    ParamSet tmp = p;  // field_table wants mutable refs; serialize from a copy
    auto fields = field_table(tmp);
    std::ostringstream out;
    out << "# scheduling engine configuration (canonical SI units)\n";
    for (const auto& f : fields)
        out << join_key(f.base, f.family->canonical) << " = " << fmt_double(*f.target) << "\n";
    out << "transition_matrix = " << transition_to_string(p.op.transitions) << "\n";
    out << "temp_penalty_form = " << (p.econ.temp_penalty_quadratic ? "quadratic" : "l1") << "\n";
    for (const auto& c : p.econ.component_costs) {
        out << "component_" << c.name << "_unit_cost_CNY = " << fmt_double(c.unit_cost) << "\n";
        out << "component_" << c.name << "_capacity = " << fmt_double(c.capacity) << "\n";
        out << "component_" << c.name << "_life_years = " << fmt_double(c.life_years) << "\n";
        out << "component_" << c.name << "_om_ratio = " << fmt_double(c.om_ratio) << "\n";
    }
    return out.str();
}

double capital_recovery_factor(double rate, double life_years) {
    if (!(life_years > 0))
        throw ValidationError("life_years", "must be positive");
    if (rate == 0) return 1.0 / life_years;
    double g = std::pow(1.0 + rate, life_years);
    return rate * g / (g - 1.0);
}

double capex_om_cost(const EconomicParams& econ, double days) {
    double annual = 0;
    for (const auto& c : econ.component_costs) {
        double invest = c.unit_cost * c.capacity;
        annual += invest * (capital_recovery_factor(econ.discount_rate, c.life_years) + c.om_ratio);
    }
    return annual * days / 365.0;
}

double stoichiometric_reaction_heat(double nh3_t_per_h) {
    return nh3_t_per_h * 1000.0 / kNh3MolarMass * kReactionEnthalpy / 3600.0;
}

double estimate_capacitance(const ReactorGeometry& g) {
    auto term = [](double m, double c, const char* mf, const char* cf) {
        if (!(m >= 0) || !std::isfinite(m)) throw ValidationError(mf, "mass must be non-negative");
        if (m > 0 && !(c > 0)) throw ValidationError(cf, "specific heat must be positive");
        return m * c;
    };
    double total = term(g.shell_mass, g.shell_specific_heat, "shell_mass", "shell_specific_heat") +
                   term(g.internals_mass, g.internals_specific_heat, "internals_mass",
                        "internals_specific_heat") +
                   term(g.catalyst_mass, g.catalyst_specific_heat, "catalyst_mass",
                        "catalyst_specific_heat");
    if (!(total > 0))
        throw ValidationError("geometry", "total heat capacitance must be positive");
    return total;
}

double estimate_loss_resistance(const ReactorGeometry& g) {
    require_positive(g.wall_thickness, "wall_thickness");
    require_positive(g.wall_conductivity, "wall_conductivity");
    require_positive(g.insulation_thickness, "insulation_thickness");
    require_positive(g.insulation_conductivity, "insulation_conductivity");
    require_positive(g.side_wall_area, "side_wall_area");
    require_positive(g.end_wall_area, "end_wall_area");
    require_positive(g.side_insulation_area, "side_insulation_area");
    require_positive(g.end_insulation_area, "end_insulation_area");
    // Conduction through wall then insulation, side shell in parallel with two ends.
    double r_side = g.wall_thickness / (g.wall_conductivity * g.side_wall_area) +
                    g.insulation_thickness / (g.insulation_conductivity * g.side_insulation_area);
    double r_end = g.wall_thickness / (g.wall_conductivity * g.end_wall_area) +
                   g.insulation_thickness / (g.insulation_conductivity * g.end_insulation_area);
    return 1.0 / (1.0 / r_side + 2.0 / r_end);
}

namespace {

ReactorGeometry load_vessel(const KvFile& kv, const std::string& prefix) {
    auto get = [&](const char* name) {
        std::string key = prefix + name;
        if (!kv.has(key)) throw ValidationError(key, "missing geometry key");
        return kv.get_double(key);
    };
    ReactorGeometry g{};
    g.shell_mass = get("shell_mass_kg");
    g.shell_specific_heat = get("shell_specific_heat_J_per_kgK");
    g.internals_mass = get("internals_mass_kg");
    g.internals_specific_heat = get("internals_specific_heat_J_per_kgK");
    g.catalyst_mass = get("catalyst_mass_kg");
    g.catalyst_specific_heat = get("catalyst_specific_heat_J_per_kgK");
    g.wall_thickness = get("wall_thickness_m");
    g.wall_conductivity = get("wall_conductivity_W_per_mK");
    g.insulation_thickness = get("insulation_thickness_m");
    g.insulation_conductivity = get("insulation_conductivity_W_per_mK");
    g.side_wall_area = get("side_wall_area_m2");
    g.end_wall_area = get("end_wall_area_m2");
    g.side_insulation_area = get("side_insulation_area_m2");
    g.end_insulation_area = get("end_insulation_area_m2");
    return g;
}

}  // namespace

GeometrySet load_geometry(const std::string& path) {
    KvFile kv = KvFile::parse_file(path);
    GeometrySet gs{load_vessel(kv, "asr_"), load_vessel(kv, "tank_")};
    for (const auto& entry : kv.entries) {
        if (entry.first.rfind("asr_", 0) != 0 && entry.first.rfind("tank_", 0) != 0)
            throw ValidationError(entry.first, "unknown geometry key");
    }
    return gs;
}

StorageScheme builtin_scheme(const std::string& name) {
    const double large_bes = 32.0 * 3.6e9;  // J
    const double small_bes = 4.0 * 3.6e9;
    const double hs_cap = 1.5e5;  // Nm3 gross
    const double ms_vol = 20.0;   // m3
    StorageScheme s;
    s.name = name;
    if (name == "scheme1") {
        s.has_bes = true; s.bes_energy = large_bes; s.bes_power = 8e6;
        s.has_hs = true; s.hs_capacity = hs_cap;
    } else if (name == "scheme2") {
        s.has_hs = true; s.hs_capacity = hs_cap;
    } else if (name == "scheme3") {
        s.has_mstes = true; s.ms_volume = ms_vol;
    } else if (name == "scheme4") {
        s.has_bes = true; s.bes_energy = large_bes; s.bes_power = 8e6;
        s.has_hs = true; s.hs_capacity = hs_cap;
        s.has_mstes = true; s.ms_volume = ms_vol;
    } else if (name == "scheme5") {
        s.has_bes = true; s.bes_energy = small_bes; s.bes_power = 1e6;
        s.has_hs = true; s.hs_capacity = hs_cap;
        s.has_mstes = true; s.ms_volume = ms_vol;
    } else if (name == "none") {
        // all storage absent; production runs straight through
    } else {
        throw ValidationError("scheme", "unknown scheme '" + name + "'");
    }
    return s;
}

std::vector<StorageScheme> builtin_schemes() {
    return {builtin_scheme("scheme1"), builtin_scheme("scheme2"), builtin_scheme("scheme3"),
            builtin_scheme("scheme4"), builtin_scheme("scheme5")};
}

double ambient_at(const ScenarioProfile& s, int step) {
    if (s.ambient.empty()) return 288.0;
    if (s.ambient.size() == 1) return s.ambient[0];
    return s.ambient.at(static_cast<size_t>(step));
}

namespace {

// Returns the first column whose name is base_suffix for any suffix in the family.
int find_unit_column(const Csv& csv, const char* base, const UnitFamily& fam, double& scale,
                     double& offset) {
    for (const auto& u : fam.options) {
        std::string name = join_key(base, u.suffix);
        for (size_t i = 0; i < csv.header.size(); ++i) {
            if (csv.header[i] == name) {
                scale = u.scale;
                offset = u.offset;
                return static_cast<int>(i);
            }
        }
    }
    return -1;
}

std::optional<double> sidecar_unit_value(const KvFile& kv, const char* base,
                                         const UnitFamily& fam) {
    std::optional<double> out;
    std::string found;
    for (const auto& u : fam.options) {
        std::string key = join_key(base, u.suffix);
        if (!kv.has(key)) continue;
        if (out)
            throw ValidationError(key, "field already set by key '" + found + "'");
        out = kv.get_double(key) * u.scale + u.offset;
        found = key;
    }
    return out;
}

}  // namespace

ScenarioProfile load_scenario(const std::string& csv_path, const std::string& sidecar_path) {
    Csv csv = Csv::parse_file(csv_path);
    ScenarioProfile s;
    double w_scale, w_off, p_scale, p_off, a_scale, a_off;
    int wind_col = find_unit_column(csv, "wind", fam_power(), w_scale, w_off);
    int pv_col = find_unit_column(csv, "pv", fam_power(), p_scale, p_off);
    int amb_col = find_unit_column(csv, "ambient", fam_temp(), a_scale, a_off);
    if (wind_col < 0) throw ParseError(csv_path, 1, "missing wind power column");
    if (pv_col < 0) throw ParseError(csv_path, 1, "missing pv power column");
    s.horizon_steps = static_cast<int>(csv.rows.size());
    for (const auto& row : csv.rows) {
        s.wind.push_back(parse_double(row[static_cast<size_t>(wind_col)], "wind") * w_scale);
        s.pv.push_back(parse_double(row[static_cast<size_t>(pv_col)], "pv") * p_scale);
        if (amb_col >= 0)
            s.ambient.push_back(parse_double(row[static_cast<size_t>(amb_col)], "ambient") *
                                    a_scale + a_off);
    }

    KvFile kv = KvFile::parse_file(sidecar_path);
    static const UnitFamily time_fam{"s", {{"s", 1, 0}, {"min", 60, 0}, {"h", 3600, 0}}};
    if (auto v = sidecar_unit_value(kv, "dt", time_fam)) s.dt = *v;
    auto asr0 = sidecar_unit_value(kv, "initial_asr_temp", fam_temp());
    auto ms0 = sidecar_unit_value(kv, "initial_ms_temp", fam_temp());
    if (!asr0) throw ValidationError("initial_asr_temp", "missing from scenario sidecar");
    if (!ms0) throw ValidationError("initial_ms_temp", "missing from scenario sidecar");
    s.initial_asr_temp = *asr0;
    s.initial_ms_temp = *ms0;
    if (kv.has("initial_mode")) s.initial_mode = mode_from_string(kv.get("initial_mode"));
    if (kv.has("initial_load")) s.initial_load = kv.get_double("initial_load");
    if (auto v = sidecar_unit_value(kv, "initial_bes_energy", fam_energy()))
        s.initial_bes_energy = v;
    if (kv.has("initial_bes_frac")) s.initial_bes_frac = kv.get_double("initial_bes_frac");
    if (kv.has("initial_hs_level_Nm3")) s.initial_hs_level = kv.get_double("initial_hs_level_Nm3");
    if (kv.has("initial_hs_frac")) s.initial_hs_frac = kv.get_double("initial_hs_frac");
    if (s.ambient.empty()) {
        if (auto v = sidecar_unit_value(kv, "ambient_temp", fam_temp()))
            s.ambient.push_back(*v);
    }
    validate_scenario(s);
    return s;
}

void validate_scenario(const ScenarioProfile& s) {
    if (!(s.dt > 0)) throw ValidationError("dt", "must be positive");
    if (s.horizon_steps <= 0) throw ValidationError("horizon_steps", "must be positive");
    auto n = static_cast<size_t>(s.horizon_steps);
    if (s.wind.size() != n) throw ValidationError("wind", "length must match horizon");
    if (s.pv.size() != n) throw ValidationError("pv", "length must match horizon");
    if (!s.ambient.empty() && s.ambient.size() != 1 && s.ambient.size() != n)
        throw ValidationError("ambient", "length must be 1 or match horizon");
    for (double v : s.wind)
        if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("wind", "values must be >= 0");
    for (double v : s.pv)
        if (!(v >= 0) || !std::isfinite(v)) throw ValidationError("pv", "values must be >= 0");
    if (!(s.initial_asr_temp > 0)) throw ValidationError("initial_asr_temp", "must be positive");
    if (!(s.initial_ms_temp > 0)) throw ValidationError("initial_ms_temp", "must be positive");
    if (!(s.initial_load >= 0)) throw ValidationError("initial_load", "must be >= 0");
    if (!(s.initial_bes_frac >= 0) || !(s.initial_bes_frac <= 1))
        throw ValidationError("initial_bes_frac", "must lie in [0, 1]");
    if (!(s.initial_hs_frac >= 0) || !(s.initial_hs_frac <= 1))
        throw ValidationError("initial_hs_frac", "must lie in [0, 1]");
}

double mstes_kwh_per_m3(const ThermalParams& t, const OperationalParams& op) {
    // rho * c * band [J/m3] converted to kWh/m3.
    return t.ms_density * t.ms_specific_heat * (op.ms_temp_max - op.ms_temp_min) / 3.6e6;
}

}  // namespace p2a::params
