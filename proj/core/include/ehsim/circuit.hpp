#pragma once

// =============================================================================
// Equivalent-circuit model of the harvester / power manager / supercapacitor
// stage: equivalent resistances, the four state-conditional closed-form
// voltage laws, their inverses and an independent RK4 integrator of the
// underlying ODEs.
// =============================================================================

#include <limits>
#include <optional>

namespace ehsim {

/// Sentinel returned by r_pm() when the PM switch is open (no load power).
inline constexpr double kInfiniteResistance = std::numeric_limits<double>::infinity();

/// Voltage comparisons throughout the library use this absolute tolerance.
inline constexpr double kVoltageTolerance = 1e-9;

struct CircuitParams {
    double capacitance = 0.0;         ///< C [F]
    double leakage_resistance = 0.0;  ///< R_c [ohm], self-discharge path
    double w_pm = 1.0;                ///< PM inefficiency multiplier (>= 1)
    double e_pm = 3.3;                ///< regulated load-side voltage [V]
    double v_on = 0.0;                ///< PM turn-on threshold [V]
    double v_off = 0.0;               ///< PM cutoff threshold [V]
    double coldstart_energy = 0.0;    ///< extra energy drawn after an OFF excursion [J]
    double coldstart_duration = 0.0;  ///< duration of that transient [s]
    /// The harvester reconnects once V_c has fallen this far below E_eh after an overcharge clamp.
    double eh_reconnect_hysteresis = 0.05;

    /// Throws ConfigError if any invariant is violated.
    void validate() const;

    [[nodiscard]] double time_constant() const noexcept { return capacitance * leakage_resistance; }
};

/// Selects one of the four closed-form laws.
struct CircuitMode {
    bool pm_on = false;         ///< load powered (sw closed)
    bool eh_connected = false;  ///< harvester delivering p_h > 0

    friend bool operator==(const CircuitMode&, const CircuitMode&) = default;
};

// -- equivalent resistances and PM power --------------------------------------

/// Harvester series resistance R_eh = v_c (e_eh - v_c) / p_eh.
/// Outside 0 < v_c < e_eh or for p_eh <= 0 the clamp rule applies instead and
/// this throws DomainError.
[[nodiscard]] double r_eh(double v_c, double e_eh, double p_eh);

/// Capacitor-side power needed to deliver p_cl to the load.
[[nodiscard]] double p_pm(double p_cl, double w_pm);

/// Equivalent PM input resistance v_c^2 / (w_pm p_cl); kInfiniteResistance when p_cl == 0.
[[nodiscard]] double r_pm(double v_c, double w_pm, double p_cl);

// -- closed-form laws ----------------------------------------------------------

/// PM off, harvester disconnected: pure leakage decay v0 exp(-t / (C R_c)).
[[nodiscard]] double v_off_disconnected(double v0, double t, const CircuitParams& params);

/// PM off, harvester connected: lossless charge sqrt(2 p_h t / C + v0^2).
[[nodiscard]] double v_off_connected(double v0, double t, double p_h, const CircuitParams& params);

/// Latest time for which v_on_disconnected() is defined (its radicand reaches zero).
/// Infinite when p_cl == 0.
[[nodiscard]] double on_disconnected_valid_time(double v0, double p_cl, const CircuitParams& params);

/// PM on, harvester disconnected: load and leakage both drain the capacitor.
/// Throws ValidityError for t beyond on_disconnected_valid_time().
[[nodiscard]] double v_on_disconnected(double v0, double t, double p_cl, const CircuitParams& params);

/// PM on, harvester connected: sqrt(2 (p_eh - w_pm p_cl) t / C + v0^2).
/// Throws ValidityError when the radicand is negative.
[[nodiscard]] double v_on_connected(double v0, double t, double p_eh, double p_cl,
                                    const CircuitParams& params);

/// Generalised law with leakage: d(V^2)/dt = 2 p_net / C - 2 V^2 / (C R_c).
/// v_off_disconnected and v_on_disconnected are special cases; the connected
/// modes use it when leakage is enabled there.
[[nodiscard]] double v_with_leakage(double v0, double t, double p_net, const CircuitParams& params);

/// Net power into the capacitor ignoring leakage: p_eh - w_pm p_cl.
[[nodiscard]] double net_power(CircuitMode mode, double p_eh, double p_cl, const CircuitParams& params);

/// Dispatches to the law selected by mode. With leakage_in_connected_modes the
/// connected laws gain the R_c term.
[[nodiscard]] double evaluate_law(CircuitMode mode, double v0, double t, double p_eh, double p_cl,
                                  const CircuitParams& params, bool leakage_in_connected_modes = false);

/// Time at which the active law reaches v_target, or nullopt if it never does.
[[nodiscard]] std::optional<double> time_to_voltage(CircuitMode mode, double v0, double v_target,
                                                    double p_eh, double p_cl, const CircuitParams& params,
                                                    bool leakage_in_connected_modes = false);

/// Fixed-step classical RK4 integration of the mode's ODE from v0 over [0, t].
/// The step is shrunk so that an integer number of steps lands exactly on t.
/// Throws DomainError if a stage drives V to zero or below.
[[nodiscard]] double rk4_oracle(CircuitMode mode, double v0, double t, double dt, double p_eh,
                                double p_cl, const CircuitParams& params,
                                bool leakage_in_connected_modes = false);

}  // namespace ehsim
