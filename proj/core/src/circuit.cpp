#include "ehsim/circuit.hpp"

#include <cmath>
#include <string>

#include "ehsim/errors.hpp"

namespace ehsim {

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("time must be finite and >= 0, got " + std::to_string(t));
    }
}

void require_voltage(double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("voltage must be finite and >= 0, got " + std::to_string(v));
    }
}

// One minus exp(-x), accurate for small x.
double decay_fraction(double x) { return -std::expm1(-x); }

// Squared voltage of the leaky law after time t.
double leaky_radicand(double v0, double t, double p_net, const CircuitParams& params) {
    const double tau = params.time_constant();
    const double asymptote = p_net * params.leakage_resistance;
    return v0 * v0 + (asymptote - v0 * v0) * decay_fraction(2.0 * t / tau);
}

}  // namespace

void CircuitParams::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("circuit: " + msg); };
    if (!(capacitance > 0.0) || !std::isfinite(capacitance)) fail("capacitance must be > 0");
    if (!(leakage_resistance > 0.0) || !std::isfinite(leakage_resistance)) fail("leakage resistance must be > 0");
    if (!(w_pm >= 1.0) || !std::isfinite(w_pm)) fail("w_pm must be >= 1");
    if (!(e_pm > 0.0)) fail("E_pm must be > 0");
    if (!(v_off > 0.0)) fail("V_off must be > 0");
    if (!(v_on > v_off) || !std::isfinite(v_on)) fail("V_on must exceed V_off");
    if (!(coldstart_energy >= 0.0)) fail("cold-start energy must be >= 0");
    if (!(coldstart_duration >= 0.0)) fail("cold-start duration must be >= 0");
    if (coldstart_energy > 0.0 && coldstart_duration == 0.0) {
        fail("a cold-start energy needs a positive cold-start duration");
    }
    if (!(eh_reconnect_hysteresis > 0.0) || !std::isfinite(eh_reconnect_hysteresis)) {
        fail("E_eh reconnect hysteresis must be > 0");
    }
}

double r_eh(double v_c, double e_eh, double p_eh) {
    if (!(p_eh > 0.0)) {
        throw DomainError("r_eh: harvested power must be > 0 (apply the disconnect clamp instead)");
    }
    if (!(v_c > 0.0) || !(v_c < e_eh) || e_eh - v_c <= kVoltageTolerance) {
        throw DomainError("r_eh: v_c must lie strictly inside (0, E_eh) (apply the disconnect clamp instead)");
    }
    return v_c * (e_eh - v_c) / p_eh;
}

double p_pm(double p_cl, double w_pm) {
    if (!(w_pm >= 1.0)) throw DomainError("p_pm: w_pm must be >= 1");
    if (!(p_cl >= 0.0)) throw DomainError("p_pm: load power must be >= 0");
    return w_pm * p_cl;
}

double r_pm(double v_c, double w_pm, double p_cl) {
    if (!(v_c > 0.0)) throw DomainError("r_pm: v_c must be > 0");
    if (!(w_pm >= 1.0)) throw DomainError("r_pm: w_pm must be >= 1");
    if (!(p_cl >= 0.0)) throw DomainError("r_pm: load power must be >= 0");
    if (p_cl == 0.0) return kInfiniteResistance;
    return v_c * v_c / (w_pm * p_cl);
}

double v_off_disconnected(double v0, double t, const CircuitParams& params) {
    require_voltage(v0);
    require_time(t);
    return v0 * std::exp(-t / params.time_constant());
}

double v_off_connected(double v0, double t, double p_h, const CircuitParams& params) {
    require_voltage(v0);
    require_time(t);
    if (!(p_h > 0.0)) throw DomainError("v_off_connected: p_h must be > 0 (use v_off_disconnected)");
    return std::sqrt(2.0 * p_h * t / params.capacitance + v0 * v0);
}

double on_disconnected_valid_time(double v0, double p_cl, const CircuitParams& params) {
    require_voltage(v0);
    const double drain = params.w_pm * p_cl * params.leakage_resistance;
    if (!(drain > 0.0)) return std::numeric_limits<double>::infinity();
    return 0.5 * params.time_constant() * std::log1p(v0 * v0 / drain);
}

double v_on_disconnected(double v0, double t, double p_cl, const CircuitParams& params) {
    require_voltage(v0);
    require_time(t);
    if (!(p_cl >= 0.0)) throw DomainError("v_on_disconnected: load power must be >= 0");
    const double radicand = leaky_radicand(v0, t, -params.w_pm * p_cl, params);
    if (radicand >= 0.0) return std::sqrt(radicand);
    const double t_valid = on_disconnected_valid_time(v0, p_cl, params);
    if (t <= t_valid * (1.0 + 1e-12)) return 0.0;
    throw ValidityError("v_on_disconnected: t = " + std::to_string(t) + " s exceeds the validity bound " +
                        std::to_string(t_valid) + " s");
}

double v_on_connected(double v0, double t, double p_eh, double p_cl, const CircuitParams& params) {
    require_voltage(v0);
    require_time(t);
    if (!(p_eh > 0.0)) throw DomainError("v_on_connected: p_eh must be > 0 (use v_on_disconnected)");
    if (!(p_cl >= 0.0)) throw DomainError("v_on_connected: load power must be >= 0");
    const double net = p_eh - params.w_pm * p_cl;
    const double radicand = 2.0 * net * t / params.capacitance + v0 * v0;
    if (radicand < 0.0) {
        if (radicand > -1e-18) return 0.0;
        throw ValidityError("v_on_connected: radicand negative at t = " + std::to_string(t) + " s");
    }
    return std::sqrt(radicand);
}

double v_with_leakage(double v0, double t, double p_net, const CircuitParams& params) {
    require_voltage(v0);
    require_time(t);
    const double radicand = leaky_radicand(v0, t, p_net, params);
    if (radicand < 0.0) {
        if (radicand > -1e-18) return 0.0;
        throw ValidityError("v_with_leakage: radicand negative at t = " + std::to_string(t) + " s");
    }
    return std::sqrt(radicand);
}

double net_power(CircuitMode mode, double p_eh, double p_cl, const CircuitParams& params) {
    const double in = mode.eh_connected ? p_eh : 0.0;
    const double out = mode.pm_on ? params.w_pm * p_cl : 0.0;
    return in - out;
}

double evaluate_law(CircuitMode mode, double v0, double t, double p_eh, double p_cl,
                    const CircuitParams& params, bool leakage_in_connected_modes) {
    if (mode.eh_connected && leakage_in_connected_modes) {
        if (!(p_eh > 0.0)) throw DomainError("evaluate_law: connected mode needs p_eh > 0");
        return v_with_leakage(v0, t, net_power(mode, p_eh, p_cl, params), params);
    }
    if (!mode.pm_on && !mode.eh_connected) return v_off_disconnected(v0, t, params);
    if (!mode.pm_on) return v_off_connected(v0, t, p_eh, params);
    if (!mode.eh_connected) return v_on_disconnected(v0, t, p_cl, params);
    return v_on_connected(v0, t, p_eh, p_cl, params);
}

std::optional<double> time_to_voltage(CircuitMode mode, double v0, double v_target, double p_eh,
                                      double p_cl, const CircuitParams& params,
                                      bool leakage_in_connected_modes) {
    require_voltage(v0);
    require_voltage(v_target);
    if (mode.eh_connected && !(p_eh > 0.0)) throw DomainError("time_to_voltage: connected mode needs p_eh > 0");
    if (mode.pm_on && !(p_cl >= 0.0)) throw DomainError("time_to_voltage: load power must be >= 0");
    if (v_target == v0) return 0.0;

    const double tau = params.time_constant();
    const bool leaky = !mode.eh_connected || leakage_in_connected_modes;
    const double p_net = net_power(mode, p_eh, p_cl, params);

    if (!mode.pm_on && !mode.eh_connected) {
        // Exponential decay never reaches zero and never rises.
        if (v_target > v0 || v_target <= 0.0) return std::nullopt;
        return tau * std::log(v0 / v_target);
    }

    if (leaky) {
        // V^2 relaxes monotonically from v0^2 towards p_net R_c.
        const double asymptote = p_net * params.leakage_resistance;
        const double v0_sq = v0 * v0;
        const double target_sq = v_target * v_target;
        const double travel = v0_sq - target_sq;
        const double remaining = target_sq - asymptote;
        if (remaining == 0.0 || (travel > 0.0) != (remaining > 0.0)) return std::nullopt;
        return 0.5 * tau * std::log1p(travel / remaining);
    }

    // Lossless laws: V^2 is linear in t.
    if (p_net == 0.0) return std::nullopt;
    const double t = params.capacitance * (v_target * v_target - v0 * v0) / (2.0 * p_net);
    if (t < 0.0) return std::nullopt;
    return t;
}

double rk4_oracle(CircuitMode mode, double v0, double t, double dt, double p_eh, double p_cl,
                  const CircuitParams& params, bool leakage_in_connected_modes) {
    require_voltage(v0);
    require_time(t);
    if (t == 0.0) return v0;
    if (!(dt > 0.0)) throw DomainError("rk4_oracle: dt must be > 0");
    if (mode.eh_connected && !(p_eh > 0.0)) throw DomainError("rk4_oracle: connected mode needs p_eh > 0");

    const double c = params.capacitance;
    const double r_c = params.leakage_resistance;
    const double harvested = mode.eh_connected ? p_eh : 0.0;
    const double drawn = mode.pm_on ? params.w_pm * p_cl : 0.0;
    const bool leaky = !mode.eh_connected || leakage_in_connected_modes;
    const bool has_power_term = harvested != 0.0 || drawn != 0.0;

    // dV/dt = I_c / C with I_c = (P_eh - w_pm P_cl) / V - V / R_c.
    auto slope = [&](double v) {
        double dv = 0.0;
        if (has_power_term) dv += (harvested - drawn) / (c * v);
        if (leaky) dv -= v / (c * r_c);
        return dv;
    };

    const auto steps = static_cast<long long>(std::ceil(t / dt - 1e-9));
    const double h = t / static_cast<double>(steps);
    double v = v0;
    for (long long i = 0; i < steps; ++i) {
        auto check = [i, has_power_term](double stage) {
            if (has_power_term && !(stage > 0.0)) {
                throw DomainError("rk4_oracle: voltage reached zero at step " + std::to_string(i));
            }
        };
        check(v);
        const double k1 = slope(v);
        const double v2 = v + 0.5 * h * k1;
        check(v2);
        const double k2 = slope(v2);
        const double v3 = v + 0.5 * h * k2;
        check(v3);
        const double k3 = slope(v3);
        const double v4 = v + h * k3;
        check(v4);
        const double k4 = slope(v4);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!(v >= 0.0)) throw DomainError("rk4_oracle: voltage went negative at step " + std::to_string(steps));
    return v;
}

}  // namespace ehsim
