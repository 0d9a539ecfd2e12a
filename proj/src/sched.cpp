#include "p2a/sched.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "p2a/thermal.hpp"
#include "p2a/util.hpp"

namespace p2a::sched {

using milp::LinExpr;
using milp::Sense;
using milp::VarRef;
using params::Mode;

namespace {

// Short state tags used in variable and row names, indexed by Mode.
constexpr const char* kStateTag[params::kNumModes] = {"off", "cs", "on", "by"};

std::string nm(const char* base, int t) {
    return std::string(base) + "_t" + std::to_string(t);
}

double dt_hours(const params::ScenarioProfile& s) { return s.dt / 3600.0; }

double horizon_days(const params::ScenarioProfile& s) {
    return s.horizon_steps * s.dt / 86400.0;
}

double min_ambient(const params::ScenarioProfile& s) {
    double lo = params::ambient_at(s, 0);
    for (int t = 1; t < s.horizon_steps; ++t) lo = std::min(lo, params::ambient_at(s, t));
    return lo;
}

double initial_state(const params::ScenarioProfile& s, Mode m) {
    return s.initial_mode == m ? 1.0 : 0.0;
}

double initial_load_of(const params::ScenarioProfile& s) {
    return s.initial_mode == Mode::production ? s.initial_load : 0.0;
}

VarRef state_var(const StepVars& v, Mode m) {
    switch (m) {
        case Mode::shutdown: return v.off;
        case Mode::cold_start: return v.cs;
        case Mode::production: return v.on;
        case Mode::standby: return v.by;
    }
    throw Error(Error::Kind::internal, "invalid mode value");
}

// Net enthalpy the production through-flow carries, split into the model's
// on-binary intercept and per-load slope. Standby/cold-start recycle terms
// cancel and shutdown has no flow, so only production contributes.
void production_heat_coeffs(const params::ParamSet& p, double& intercept, double& slope) {
    const auto& t = p.thermal;
    const auto& o = p.op;
    double streams =
        t.rig_specific_heat * t.rig_temp_production - t.rog_specific_heat * t.rog_temp_production;
    intercept = o.rig_flow_intercept / 3600.0 * streams;
    slope = t.reaction_heat_coeff + o.rig_flow_slope / 3600.0 * streams;
}

void overlay_capacity(std::vector<params::ComponentCost>& list, const std::string& name,
                      double capacity) {
    auto it = std::find_if(list.begin(), list.end(),
                           [&](const params::ComponentCost& c) { return c.name == name; });
    if (it != list.end()) it->capacity = capacity;
}

double value_of(const milp::Solution& sol, VarRef v) {
    return sol.values.at(static_cast<size_t>(v.id));
}

bool binary_of(const milp::Solution& sol, VarRef v) { return value_of(sol, v) > 0.5; }

}  // namespace

params::ParamSet apply_scheme(const params::ParamSet& base, const params::StorageScheme& scheme) {
    auto bad = [&](const char* field, const char* why) {
        throw ValidationError(std::string("scheme_") + field, std::string(scheme.name) + ": " + why);
    };
    if (scheme.has_bes) {
        if (!(scheme.bes_energy > 0)) bad("bes_energy", "present but not positive");
        if (!(scheme.bes_power > 0)) bad("bes_power", "present but not positive");
    } else if (scheme.bes_energy != 0 || scheme.bes_power != 0) {
        bad("bes_energy", "capacity given for an absent battery");
    }
    if (scheme.has_hs) {
        if (!(scheme.hs_capacity > 0)) bad("hs_capacity", "present but not positive");
    } else if (scheme.hs_capacity != 0) {
        bad("hs_capacity", "capacity given for an absent buffer");
    }
    if (scheme.has_mstes) {
        if (!(scheme.ms_volume > 0)) bad("ms_volume", "present but not positive");
    } else if (scheme.ms_volume != 0) {
        bad("ms_volume", "volume given for an absent tank");
    }

    params::ParamSet p = base;
    if (scheme.has_bes) {
        p.op.bes_energy_min = 0.1 * scheme.bes_energy;
        p.op.bes_energy_max = 0.9 * scheme.bes_energy;
        p.op.bes_charge_max = scheme.bes_power;
        p.op.bes_discharge_max = scheme.bes_power;
    } else {
        p.op.bes_energy_min = p.op.bes_energy_max = 0;
        p.op.bes_charge_max = p.op.bes_discharge_max = 0;
    }
    if (scheme.has_hs) {
        p.op.hs_min = 0.1 * scheme.hs_capacity;
        p.op.hs_max = 0.9 * scheme.hs_capacity;
    } else {
        p.op.hs_min = p.op.hs_max = 0;
    }
    if (scheme.has_mstes) p.thermal.ms_volume = scheme.ms_volume;

    auto& costs = p.econ.component_costs;
    overlay_capacity(costs, "bes", scheme.has_bes ? scheme.bes_energy / 3.6e6 : 0.0);
    overlay_capacity(costs, "hydrogen_storage",
                     scheme.has_hs ? params::kH2KgPerNm3 * scheme.hs_capacity : 0.0);
    overlay_capacity(costs, "ms_tes",
                     scheme.has_mstes
                         ? params::mstes_kwh_per_m3(p.thermal, p.op) * scheme.ms_volume
                         : 0.0);
    params::validate(p);
    return p;
}

double initial_bes_energy(const params::ScenarioProfile& s, const params::OperationalParams& op) {
    if (s.initial_bes_energy) {
        double v = *s.initial_bes_energy;
        if (v < op.bes_energy_min - 1e-9 || v > op.bes_energy_max + 1e-9)
            throw ValidationError("initial_bes_energy", "outside the scheme working band");
        return v;
    }
    if (s.initial_bes_frac < 0 || s.initial_bes_frac > 1)
        throw ValidationError("initial_bes_frac", "must lie in [0, 1]");
    return op.bes_energy_min + s.initial_bes_frac * (op.bes_energy_max - op.bes_energy_min);
}

double initial_hs_level(const params::ScenarioProfile& s, const params::OperationalParams& op) {
    if (s.initial_hs_level) {
        double v = *s.initial_hs_level;
        if (v < op.hs_min - 1e-9 || v > op.hs_max + 1e-9)
            throw ValidationError("initial_hs_level", "outside the scheme working band");
        return v;
    }
    if (s.initial_hs_frac < 0 || s.initial_hs_frac > 1)
        throw ValidationError("initial_hs_frac", "must lie in [0, 1]");
    return op.hs_min + s.initial_hs_frac * (op.hs_max - op.hs_min);
}

ModelBundle make_variables(const params::ScenarioProfile& scenario,
                           const params::ParamSet& effective,
                           const params::StorageScheme& scheme, const BuildOptions& options) {
    params::validate_scenario(scenario);
    ModelBundle b;
    b.scheme = scheme;
    b.p = effective;
    b.scenario = scenario;
    b.options = options;
    b.t_floor = std::min(min_ambient(scenario), scenario.initial_asr_temp);
    b.capex_om = params::capex_om_cost(effective.econ, horizon_days(scenario));

    const auto& o = effective.op;
    auto& m = b.model;
    if (options.embed != Embed::none) {
        double hi = options.embed == Embed::robust ? 1.0 : options.alpha_max;
        b.alpha = m.add_var("alpha", milp::VarType::continuous, 0.0, hi);
    }

    double ms_lb = o.ms_temp_min, ms_ub = o.ms_temp_max;
    if (!scheme.has_mstes) {
        // Bookkeeping tank: follows its loss decay, no band enforcement.
        ms_lb = std::min(min_ambient(scenario), scenario.initial_ms_temp);
        ms_ub = std::max(scenario.initial_ms_temp, o.ms_temp_max);
    }
    double aux_ub = o.aux_base_power + o.aux_load_coeff * o.load_max;
    double dpos_ub = std::max(0.0, o.asr_temp_act_max - effective.econ.temp_setpoint);
    double dneg_ub = std::max(0.0, effective.econ.temp_setpoint - b.t_floor);

    b.steps.resize(static_cast<size_t>(scenario.horizon_steps));
    for (int t = 0; t < scenario.horizon_steps; ++t) {
        StepVars& v = b.steps[static_cast<size_t>(t)];
        auto bin = [&](const char* base) {
            return m.add_var(nm(base, t), milp::VarType::binary, 0, 1);
        };
        auto con = [&](const char* base, double lb, double ub) {
            return m.add_var(nm(base, t), milp::VarType::continuous, lb, ub);
        };
        v.off = bin("off");
        v.cs = bin("cs");
        v.on = bin("on");
        v.by = bin("by");
        v.startup = bin("su");
        v.shutdown = bin("sd");
        v.inoff = bin("io");
        v.outoff = bin("oo");
        v.ms_on = bin("mson");
        v.ms_by = bin("msby");
        v.cha = bin("cha");
        v.dis = bin("dis");

        v.load = con("load", 0, o.load_max);
        v.asr_temp = con("tasr", b.t_floor, o.asr_temp_act_max);
        v.ms_temp = con("tms", ms_lb, ms_ub);
        v.q_ms = con("qms", 0, o.ms_heat_duty_max);
        v.q_su = con("qsu", 0, o.suh_heat_duty_max);
        v.q_cool = con("qcool", 0, o.cooling_duty_max);
        v.p_ms = con("pms", 0, o.ms_heater_power_max);
        v.p_su = con("psu", 0, o.suh_power_max);
        v.f_hp = con("fhp", 0, o.hp_flow_max);
        v.f_h2as = con("fh2as", 0, o.h2_consumption_rated * o.load_max);
        v.f_nh3 = con("fnh3", 0, o.nh3_rate_rated * o.load_max);
        v.hs = con("hs", o.hs_min, o.hs_max);
        v.bes = con("bes", o.bes_energy_min, o.bes_energy_max);
        v.p_cha = con("pcha", 0, o.bes_charge_max);
        v.p_dis = con("pdis", 0, o.bes_discharge_max);
        v.p_grid = con("pgrid", 0, o.grid_import_max);
        v.p_aux = con("paux", 0, aux_ub);
        v.d_pos = con("dpos", 0, dpos_ub);
        v.d_neg = con("dneg", 0, dneg_ub);

        if (!scheme.has_mstes) {
            m.fix_var(v.ms_on, 0);
            m.fix_var(v.q_ms, 0);
            m.fix_var(v.p_ms, 0);
        }
        if (!scheme.has_bes) {
            m.fix_var(v.cha, 0);
            m.fix_var(v.dis, 0);
            m.fix_var(v.p_cha, 0);
            m.fix_var(v.p_dis, 0);
            m.fix_var(v.bes, 0);
        }
    }
    return b;
}

void build_state_logic(ModelBundle& b) {
    const auto& s = b.scenario;
    const auto& o = b.p.op;
    auto& m = b.model;
    double scale = b.p.tol.big_m_scale;
    double m_gate = std::max(1.0, o.asr_temp_act_min - b.t_floor) * scale;

    for (int t = 0; t < s.horizon_steps; ++t) {
        const StepVars& v = b.steps[static_cast<size_t>(t)];
        const StepVars* pv = t > 0 ? &b.steps[static_cast<size_t>(t - 1)] : nullptr;

        LinExpr excl;
        excl.add(v.off, 1).add(v.cs, 1).add(v.on, 1).add(v.by, 1);
        m.add_row(nm("excl", t), excl, Sense::eq, 1);

        for (int from = 0; from < params::kNumModes; ++from) {
            for (int to = 0; to < params::kNumModes; ++to) {
                if (o.transitions.allowed[static_cast<size_t>(from)][static_cast<size_t>(to)])
                    continue;
                VarRef to_var = state_var(v, static_cast<Mode>(to));
                std::string name = std::string("tban_") + kStateTag[from] + "_" + kStateTag[to];
                if (pv) {
                    LinExpr e;
                    e.add(state_var(*pv, static_cast<Mode>(from)), 1).add(to_var, 1);
                    m.add_row(nm(name.c_str(), t), e, Sense::le, 1);
                } else if (initial_state(s, static_cast<Mode>(from)) > 0.5) {
                    m.add_row(nm(name.c_str(), t), LinExpr(to_var), Sense::le, 0);
                }
            }
        }

        // Production entry/exit events.
        LinExpr evp;
        evp.add(v.on, 1).add(v.startup, -1).add(v.shutdown, 1);
        double on_prev = pv ? 0.0 : initial_state(s, Mode::production);
        if (pv) evp.add(pv->on, -1);
        m.add_row(nm("evp", t), evp, Sense::eq, on_prev);
        LinExpr evpx;
        evpx.add(v.startup, 1).add(v.shutdown, 1);
        m.add_row(nm("evpx", t), evpx, Sense::le, 1);

        // Shutdown entry/exit events.
        LinExpr evo;
        evo.add(v.off, 1).add(v.inoff, -1).add(v.outoff, 1);
        double off_prev = pv ? 0.0 : initial_state(s, Mode::shutdown);
        if (pv) evo.add(pv->off, -1);
        m.add_row(nm("evo", t), evo, Sense::eq, off_prev);
        LinExpr evox;
        evox.add(v.inoff, 1).add(v.outoff, 1);
        m.add_row(nm("evox", t), evox, Sense::le, 1);

        // Catalyst activation gate: a production step must start above the
        // activation temperature. Interior steps of a run are covered by the
        // following step's gate; only the final (exit) hour may end below it.
        LinExpr gin;
        gin.add(v.on, -m_gate);
        double rhs_in = o.asr_temp_act_min - m_gate;
        if (pv)
            gin.add(pv->asr_temp, 1);
        else
            rhs_in -= s.initial_asr_temp;
        m.add_row(nm("tgate", t), gin, Sense::ge, rhs_in);
    }
}

void build_load_constraints(ModelBundle& b) {
    const auto& s = b.scenario;
    const auto& o = b.p.op;
    auto& m = b.model;
    double dt_h = dt_hours(s);
    double scale = b.p.tol.big_m_scale;
    double m_ramp = o.load_max * scale;
    double m_pin = (o.load_max - o.load_min) * scale;

    for (int t = 0; t < s.horizon_steps; ++t) {
        const StepVars& v = b.steps[static_cast<size_t>(t)];
        const StepVars* pv = t > 0 ? &b.steps[static_cast<size_t>(t - 1)] : nullptr;

        LinExpr ub;
        ub.add(v.load, 1).add(v.on, -o.load_max);
        m.add_row(nm("lub", t), ub, Sense::le, 0);
        LinExpr lb;
        lb.add(v.load, 1).add(v.on, -o.load_min);
        m.add_row(nm("llb", t), lb, Sense::ge, 0);

        // Ramps, released across entry/exit events.
        LinExpr rup;
        rup.add(v.load, 1).add(v.startup, -m_ramp).add(v.shutdown, -m_ramp);
        double rup_rhs = o.ramp_up * dt_h;
        if (pv)
            rup.add(pv->load, -1);
        else
            rup_rhs += initial_load_of(s);
        m.add_row(nm("rup", t), rup, Sense::le, rup_rhs);

        LinExpr rdn;
        rdn.add(v.load, -1).add(v.startup, -m_ramp).add(v.shutdown, -m_ramp);
        double rdn_rhs = o.ramp_down * dt_h;
        if (pv)
            rdn.add(pv->load, 1);
        else
            rdn_rhs -= initial_load_of(s);
        m.add_row(nm("rdn", t), rdn, Sense::le, rdn_rhs);

        // Boundary pinning: minimum load on the entry step and on the step
        // feeding an exit event.
        LinExpr psu;
        psu.add(v.load, 1).add(v.startup, m_pin);
        m.add_row(nm("pin_su", t), psu, Sense::le, o.load_min + m_pin);
        if (t + 1 < s.horizon_steps) {
            LinExpr psd;
            psd.add(v.load, 1).add(b.steps[static_cast<size_t>(t + 1)].shutdown, m_pin);
            m.add_row(nm("pin_sd", t), psd, Sense::le, o.load_min + m_pin);
        }
    }
}

void build_thermal_constraints(ModelBundle& b) {
    const auto& s = b.scenario;
    const auto& p = b.p;
    const auto& o = p.op;
    auto& m = b.model;
    double scale = p.tol.big_m_scale;

    double prod_intercept = 0, prod_slope = 0;
    production_heat_coeffs(p, prod_intercept, prod_slope);
    double c_dt = p.thermal.asr_capacitance / s.dt;
    double g_asr = 1.0 / p.thermal.asr_loss_resistance;
    double k_dt = thermal::ms_capacitance(p.thermal) / s.dt;
    double g_ms = 1.0 / p.thermal.ms_loss_resistance;

    struct Gate {
        const char* name;
        Mode mode;
        double temp;
    };
    double gate_prod = p.thermal.rig_temp_production + p.thermal.ms_approach_gap;
    double gate_hold = p.thermal.rig_temp_standby + p.thermal.ms_approach_gap;
    const Gate gates[] = {{"ms_gate_on", Mode::production, gate_prod},
                          {"ms_gate_by", Mode::standby, gate_hold},
                          {"ms_gate_cs", Mode::cold_start, gate_hold}};

    for (int t = 0; t < s.horizon_steps; ++t) {
        const StepVars& v = b.steps[static_cast<size_t>(t)];
        const StepVars* pv = t > 0 ? &b.steps[static_cast<size_t>(t - 1)] : nullptr;
        double amb = params::ambient_at(s, t);

        // Reactor lump, forward difference with the loss at the step start.
        LinExpr asr;
        asr.add(v.asr_temp, c_dt)
            .add(v.on, -prod_intercept)
            .add(v.load, -prod_slope)
            .add(v.q_ms, -1)
            .add(v.q_su, -1)
            .add(v.q_cool, 1);
        double asr_rhs = amb * g_asr;
        if (pv)
            asr.add(pv->asr_temp, g_asr - c_dt);
        else
            asr_rhs -= (g_asr - c_dt) * s.initial_asr_temp;
        m.add_row(nm("asr_bal", t), asr, Sense::eq, asr_rhs);

        // Salt lump. Kept as bookkeeping decay even when the scheme has no
        // exchanger (duties are fixed to zero there).
        LinExpr ms;
        ms.add(v.ms_temp, k_dt).add(v.p_ms, -o.ms_heater_eff).add(v.q_ms, 1.0 / o.ms_exchanger_eff);
        double ms_rhs = amb * g_ms;
        if (pv)
            ms.add(pv->ms_temp, g_ms - k_dt);
        else
            ms_rhs -= (g_ms - k_dt) * s.initial_ms_temp;
        m.add_row(nm("ms_bal", t), ms, Sense::eq, ms_rhs);

        // Exchanger routing exists exactly while the plant is commissioned.
        LinExpr valve;
        valve.add(v.ms_on, 1).add(v.ms_by, 1).add(v.cs, -1).add(v.on, -1).add(v.by, -1);
        m.add_row(nm("ms_valve", t), valve, Sense::eq, 0);

        LinExpr qon;
        qon.add(v.q_ms, 1).add(v.ms_on, -o.ms_heat_duty_max);
        m.add_row(nm("qms_on", t), qon, Sense::le, 0);

        LinExpr qsu;
        qsu.add(v.q_su, 1)
            .add(v.cs, -o.suh_heat_duty_max)
            .add(v.on, -o.suh_heat_duty_max)
            .add(v.by, -o.suh_heat_duty_max);
        m.add_row(nm("qsu_live", t), qsu, Sense::le, 0);

        LinExpr link;
        link.add(v.q_su, 1).add(v.p_su, -o.suh_eff);
        m.add_row(nm("suh_link", t), link, Sense::eq, 0);

        LinExpr qcool;
        qcool.add(v.q_cool, 1).add(v.on, -o.cooling_duty_max);
        m.add_row(nm("qcool_on", t), qcool, Sense::le, 0);

        if (b.scheme.has_mstes) {
            // Tank must sit above the served stream plus the approach gap
            // whenever it feeds that state.
            for (const Gate& g : gates) {
                double mg = std::max(0.0, g.temp - o.ms_temp_min) * scale;
                LinExpr e;
                e.add(v.ms_temp, 1).add(v.ms_on, -mg).add(state_var(v, g.mode), -mg);
                m.add_row(nm(g.name, t), e, Sense::ge, g.temp - 2 * mg);
            }
        }
    }
}

void build_mass_and_power(ModelBundle& b) {
    const auto& s = b.scenario;
    const auto& o = b.p.op;
    auto& m = b.model;
    double dt_h = dt_hours(s);
    double hs0 = initial_hs_level(s, o);
    double bes0 = initial_bes_energy(s, o);

    for (int t = 0; t < s.horizon_steps; ++t) {
        const StepVars& v = b.steps[static_cast<size_t>(t)];
        const StepVars* pv = t > 0 ? &b.steps[static_cast<size_t>(t - 1)] : nullptr;

        LinExpr h2;
        h2.add(v.f_h2as, 1).add(v.load, -o.h2_consumption_rated);
        m.add_row(nm("h2as", t), h2, Sense::eq, 0);

        LinExpr nh3;
        nh3.add(v.f_nh3, 1).add(v.load, -o.nh3_rate_rated);
        m.add_row(nm("nh3", t), nh3, Sense::eq, 0);

        LinExpr aux;
        aux.add(v.p_aux, 1)
            .add(v.cs, -o.aux_base_power)
            .add(v.on, -o.aux_base_power)
            .add(v.by, -o.aux_base_power)
            .add(v.load, -o.aux_load_coeff);
        m.add_row(nm("aux", t), aux, Sense::eq, 0);

        LinExpr hsb;
        hsb.add(v.hs, 1).add(v.f_hp, -dt_h).add(v.f_h2as, dt_h);
        double hs_rhs = 0;
        if (pv)
            hsb.add(pv->hs, -1);
        else
            hs_rhs = hs0;
        m.add_row(nm("hs_bal", t), hsb, Sense::eq, hs_rhs);

        LinExpr besb;
        besb.add(v.bes, 1).add(v.p_cha, -s.dt).add(v.p_dis, s.dt);
        double bes_rhs = 0;
        if (pv)
            besb.add(pv->bes, -1);
        else
            bes_rhs = bes0;
        m.add_row(nm("bes_bal", t), besb, Sense::eq, bes_rhs);

        LinExpr bdir;
        bdir.add(v.cha, 1).add(v.dis, 1);
        m.add_row(nm("bdir", t), bdir, Sense::le, 1);
        LinExpr ccap;
        ccap.add(v.p_cha, 1).add(v.cha, -o.bes_charge_max);
        m.add_row(nm("cha_cap", t), ccap, Sense::le, 0);
        LinExpr dcap;
        dcap.add(v.p_dis, 1).add(v.dis, -o.bes_discharge_max);
        m.add_row(nm("dis_cap", t), dcap, Sense::le, 0);

        // One-sided balance: consumption may not exceed what renewables,
        // the battery, and the grid supply; curtailment is the slack.
        double avail = (s.wind[static_cast<size_t>(t)] + s.pv[static_cast<size_t>(t)]) *
                       b.options.res_scale;
        LinExpr bal;
        bal.add(v.p_cha, 1)
            .add(v.p_dis, -1)
            .add(v.p_ms, 1)
            .add(v.p_su, 1)
            .add(v.p_aux, 1)
            .add(v.f_hp, o.hp_specific_power)
            .add(v.p_grid, -1);
        if (b.options.embed == Embed::robust)
            bal.add(b.alpha, avail);
        else if (b.options.embed == Embed::opportunistic)
            bal.add(b.alpha, -avail);
        m.add_row(nm("pbal", t), bal, Sense::le, avail);
    }

    if (b.options.cyclic_storage) {
        const StepVars& last = b.steps.back();
        if (b.scheme.has_hs) m.add_row("hs_cyc", LinExpr(last.hs), Sense::eq, hs0);
        if (b.scheme.has_bes) m.add_row("bes_cyc", LinExpr(last.bes), Sense::eq, bes0);
    }
}

void build_objective(ModelBundle& b) {
    const auto& s = b.scenario;
    const auto& e = b.p.econ;
    auto& m = b.model;
    if (e.temp_penalty_quadratic)
        throw ValidationError("temp_penalty_quadratic",
                              "no configured solver accepts a quadratic objective; use the "
                              "absolute-deviation default");
    double dt_h = dt_hours(s);
    double scale = b.p.tol.big_m_scale;
    double m_hi = std::max(1.0, b.p.op.asr_temp_act_max - e.temp_setpoint) * scale;
    double m_lo = std::max(1.0, e.temp_setpoint - b.t_floor) * scale;

    LinExpr revenue;
    LinExpr penalty;
    for (int t = 0; t < s.horizon_steps; ++t) {
        const StepVars& v = b.steps[static_cast<size_t>(t)];
        revenue.add(v.f_nh3, e.nh3_price * dt_h);
        revenue.add(v.p_grid, -e.grid_price * dt_h);
        revenue.add(v.inoff, -e.startup_cost);
        penalty.add(v.d_pos, 1).add(v.d_neg, 1);

        // Deviation split around the setpoint, released while decommissioned.
        LinExpr hi;
        hi.add(v.d_pos, 1).add(v.asr_temp, -1).add(v.off, m_hi);
        m.add_row(nm("dev_hi", t), hi, Sense::ge, -e.temp_setpoint);
        LinExpr lo;
        lo.add(v.d_neg, 1).add(v.asr_temp, 1).add(v.off, m_lo);
        m.add_row(nm("dev_lo", t), lo, Sense::ge, e.temp_setpoint);
    }
    revenue.add_constant(-b.capex_om);
    b.net_revenue = revenue;
    b.penalty = penalty;

    switch (b.options.embed) {
        case Embed::none: {
            LinExpr obj;
            obj.add(revenue, e.weight_profit);
            obj.add(penalty, -e.weight_temp);
            m.maximize = true;
            m.objective = obj;
            break;
        }
        case Embed::robust: {
            m.add_row("rev_floor", revenue, Sense::ge,
                      (1.0 - b.options.beta) * b.options.baseline_revenue);
            m.maximize = true;
            m.objective = LinExpr(b.alpha);
            break;
        }
        case Embed::opportunistic: {
            m.add_row("rev_floor", revenue, Sense::ge,
                      (1.0 + b.options.beta) * b.options.baseline_revenue);
            m.maximize = false;
            m.objective = LinExpr(b.alpha);
            break;
        }
    }
}

ModelBundle build_full_model(const params::ScenarioProfile& scenario,
                             const params::ParamSet& base, const params::StorageScheme& scheme,
                             const BuildOptions& options) {
    params::ParamSet effective = apply_scheme(base, scheme);
    ModelBundle b = make_variables(scenario, effective, scheme, options);
    build_state_logic(b);
    build_load_constraints(b);
    build_thermal_constraints(b);
    build_mass_and_power(b);
    build_objective(b);
    return b;
}

Schedule decode(const ModelBundle& b, const milp::Solution& sol) {
    if (sol.status != milp::SolveStatus::optimal && sol.status != milp::SolveStatus::limit)
        throw ValidationError("solution",
                              std::string("cannot decode a solution with status ") +
                                  milp::status_name(sol.status));
    if (sol.values.size() != static_cast<size_t>(b.model.num_vars()))
        throw Error(Error::Kind::internal, "solution size does not match the model");

    const auto& s = b.scenario;
    const auto& e = b.p.econ;
    Schedule out;
    out.dt = s.dt;
    out.status = sol.status;
    out.steps.reserve(b.steps.size());

    double dt_h = dt_hours(s);
    for (size_t i = 0; i < b.steps.size(); ++i) {
        const StepVars& v = b.steps[i];
        StepRecord r;
        int hits = 0;
        for (int mi = 0; mi < params::kNumModes; ++mi) {
            Mode mm = static_cast<Mode>(mi);
            if (binary_of(sol, state_var(v, mm))) {
                r.mode = mm;
                ++hits;
            }
        }
        if (hits != 1)
            throw Error(Error::Kind::internal,
                        "ambiguous plant state at step " + std::to_string(i) + " (" +
                            std::to_string(hits) + " states set)");
        r.startup = binary_of(sol, v.startup);
        r.shutdown = binary_of(sol, v.shutdown);
        r.inoff = binary_of(sol, v.inoff);
        r.outoff = binary_of(sol, v.outoff);
        r.ms_on = binary_of(sol, v.ms_on);
        r.load = value_of(sol, v.load);
        r.h2_production = value_of(sol, v.f_hp);
        r.h2_to_as = value_of(sol, v.f_h2as);
        r.hs_level = value_of(sol, v.hs);
        r.bes_energy = value_of(sol, v.bes);
        r.bes_charge = value_of(sol, v.p_cha);
        r.bes_discharge = value_of(sol, v.p_dis);
        r.grid_import = value_of(sol, v.p_grid);
        r.ms_heat_duty = value_of(sol, v.q_ms);
        r.suh_heat_duty = value_of(sol, v.q_su);
        r.cooling_duty = value_of(sol, v.q_cool);
        r.ms_heater_power = value_of(sol, v.p_ms);
        r.suh_power = value_of(sol, v.p_su);
        r.asr_temp = value_of(sol, v.asr_temp);
        r.ms_temp = value_of(sol, v.ms_temp);
        r.aux_power = value_of(sol, v.p_aux);
        r.nh3_output = value_of(sol, v.f_nh3);
        out.steps.push_back(r);
    }

    ObjectiveBreakdown& bd = out.breakdown;
    for (const StepRecord& r : out.steps) {
        bd.ammonia_revenue += e.nh3_price * r.nh3_output * dt_h;
        bd.grid_cost += e.grid_price * r.grid_import * dt_h;
        if (r.inoff) bd.startup_cost += e.startup_cost;
        if (r.mode != Mode::shutdown) bd.temp_penalty += std::abs(r.asr_temp - e.temp_setpoint);
    }
    bd.capex_om_cost = b.capex_om;
    bd.net_revenue = bd.ammonia_revenue - bd.grid_cost - bd.startup_cost - bd.capex_om_cost;
    bd.objective = e.weight_profit * bd.net_revenue - e.weight_temp * bd.temp_penalty;

    if (b.options.embed == Embed::none && sol.status == milp::SolveStatus::optimal) {
        double tol = 1e-4 * std::max(1.0, std::abs(sol.objective));
        if (std::abs(bd.objective - sol.objective) > tol)
            throw Error(Error::Kind::internal,
                        "recomputed objective " + fmt_double(bd.objective) +
                            " disagrees with the solver value " + fmt_double(sol.objective));
    }
    return out;
}

VerifyReport verify_schedule(const Schedule& s, const params::ScenarioProfile& scenario,
                             const params::ParamSet& effective) {
    VerifyReport rep;
    if (s.steps.empty()) {
        rep.empty = true;
        return rep;
    }
    if (static_cast<int>(s.steps.size()) != scenario.horizon_steps)
        throw ValidationError("schedule", "length does not match the scenario horizon");

    std::vector<thermal::Drives> drives;
    drives.reserve(s.steps.size());
    for (const StepRecord& r : s.steps) {
        thermal::Drives d;
        d.mode = r.mode;
        d.load = r.load;
        d.q_ms = r.ms_heat_duty;
        d.q_su = r.suh_heat_duty;
        d.q_cool = r.cooling_duty;
        d.p_ms_heater = r.ms_heater_power;
        drives.push_back(d);
    }
    thermal::Trajectory traj = thermal::replay(drives, scenario, scenario.initial_asr_temp,
                                               scenario.initial_ms_temp, effective.thermal,
                                               effective.op);

    double dt_h = scenario.dt / 3600.0;
    double hs_prev = initial_hs_level(scenario, effective.op);
    double bes_prev = initial_bes_energy(scenario, effective.op);
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const StepRecord& r = s.steps[i];
        double da = std::abs(traj.asr_temp[i] - r.asr_temp);
        if (da > rep.max_asr_dev) {
            rep.max_asr_dev = da;
            rep.asr_worst_step = static_cast<int>(i);
        }
        double dm = std::abs(traj.ms_temp[i] - r.ms_temp);
        if (dm > rep.max_ms_dev) {
            rep.max_ms_dev = dm;
            rep.ms_worst_step = static_cast<int>(i);
        }
        double hs_err = std::abs(r.hs_level - hs_prev - dt_h * (r.h2_production - r.h2_to_as));
        if (hs_err > rep.hs_residual) {
            rep.hs_residual = hs_err;
            rep.hs_worst_step = static_cast<int>(i);
        }
        double bes_err =
            std::abs(r.bes_energy - bes_prev - scenario.dt * (r.bes_charge - r.bes_discharge));
        if (bes_err > rep.bes_residual) {
            rep.bes_residual = bes_err;
            rep.bes_worst_step = static_cast<int>(i);
        }
        double use = r.bes_charge - r.bes_discharge + r.ms_heater_power + r.suh_power +
                     r.aux_power + effective.op.hp_specific_power * r.h2_production -
                     r.grid_import;
        double avail = scenario.wind[i] + scenario.pv[i];
        double short_w = use - avail;
        if (short_w > rep.power_violation) {
            rep.power_violation = short_w;
            rep.power_worst_step = static_cast<int>(i);
        }
        hs_prev = r.hs_level;
        bes_prev = r.bes_energy;
    }
    return rep;
}

std::string schedule_to_csv(const Schedule& s) {
    std::ostringstream out;
    out << "step,dt_s,mode,startup,shutdown,inoff,outoff,load,h2_production_Nm3h,"
           "h2_to_as_Nm3h,hs_level_Nm3,bes_energy_J,bes_charge_W,bes_discharge_W,grid_import_W,"
           "ms_on,ms_heat_duty_W,suh_heat_duty_W,cooling_duty_W,ms_heater_power_W,suh_power_W,"
           "asr_temp_K,ms_temp_K,aux_power_W,nh3_output_tph\n";
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const StepRecord& r = s.steps[i];
        out << i << "," << fmt_double(s.dt) << "," << params::mode_name(r.mode) << ","
            << (r.startup ? 1 : 0) << "," << (r.shutdown ? 1 : 0) << "," << (r.inoff ? 1 : 0)
            << "," << (r.outoff ? 1 : 0) << "," << fmt_double(r.load) << ","
            << fmt_double(r.h2_production) << "," << fmt_double(r.h2_to_as) << ","
            << fmt_double(r.hs_level) << "," << fmt_double(r.bes_energy) << ","
            << fmt_double(r.bes_charge) << "," << fmt_double(r.bes_discharge) << ","
            << fmt_double(r.grid_import) << "," << (r.ms_on ? 1 : 0) << ","
            << fmt_double(r.ms_heat_duty) << "," << fmt_double(r.suh_heat_duty) << ","
            << fmt_double(r.cooling_duty) << "," << fmt_double(r.ms_heater_power) << ","
            << fmt_double(r.suh_power) << "," << fmt_double(r.asr_temp) << ","
            << fmt_double(r.ms_temp) << "," << fmt_double(r.aux_power) << ","
            << fmt_double(r.nh3_output) << "\n";
    }
    return out.str();
}

Schedule schedule_from_csv(const std::string& text, const std::string& context) {
    Csv csv = Csv::parse_text(text, context);
    auto col = [&](const char* name) {
        int c = csv.column(name);
        if (c < 0) throw ParseError(context, 1, std::string("missing column ") + name);
        return static_cast<size_t>(c);
    };
    size_t c_step = col("step"), c_dt = col("dt_s"), c_mode = col("mode");
    size_t c_su = col("startup"), c_sd = col("shutdown"), c_io = col("inoff"),
           c_oo = col("outoff");
    size_t c_load = col("load"), c_fhp = col("h2_production_Nm3h"),
           c_fh2as = col("h2_to_as_Nm3h"), c_hs = col("hs_level_Nm3"),
           c_bes = col("bes_energy_J"), c_cha = col("bes_charge_W"),
           c_dis = col("bes_discharge_W"), c_grid = col("grid_import_W"), c_mson = col("ms_on"),
           c_qms = col("ms_heat_duty_W"), c_qsu = col("suh_heat_duty_W"),
           c_qcool = col("cooling_duty_W"), c_pms = col("ms_heater_power_W"),
           c_psu = col("suh_power_W"), c_tasr = col("asr_temp_K"), c_tms = col("ms_temp_K"),
           c_aux = col("aux_power_W"), c_nh3 = col("nh3_output_tph");

    Schedule s;
    for (size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        auto num = [&](size_t c) { return parse_double(row.at(c), context); };
        auto flag = [&](size_t c) { return num(c) > 0.5; };
        if (static_cast<size_t>(num(c_step)) != i)
            throw ParseError(context, static_cast<int>(i) + 2, "step index out of order");
        if (i == 0) s.dt = num(c_dt);
        StepRecord r;
        r.mode = params::mode_from_string(row.at(c_mode));
        r.startup = flag(c_su);
        r.shutdown = flag(c_sd);
        r.inoff = flag(c_io);
        r.outoff = flag(c_oo);
        r.load = num(c_load);
        r.h2_production = num(c_fhp);
        r.h2_to_as = num(c_fh2as);
        r.hs_level = num(c_hs);
        r.bes_energy = num(c_bes);
        r.bes_charge = num(c_cha);
        r.bes_discharge = num(c_dis);
        r.grid_import = num(c_grid);
        r.ms_on = flag(c_mson);
        r.ms_heat_duty = num(c_qms);
        r.suh_heat_duty = num(c_qsu);
        r.cooling_duty = num(c_qcool);
        r.ms_heater_power = num(c_pms);
        r.suh_power = num(c_psu);
        r.asr_temp = num(c_tasr);
        r.ms_temp = num(c_tms);
        r.aux_power = num(c_aux);
        r.nh3_output = num(c_nh3);
        s.steps.push_back(r);
    }
    return s;
}

}  // namespace p2a::sched
