#pragma once

// Energy-conservation duty-cycle planning: a node with active time T_a and
// sleep time T_s runs forever on harvested power iff
//     E_harv(T_a + T_s) >= E_deva(T_a) + E_devs(T_s).

#include <optional>
#include <utility>
#include <vector>

#include "ehsim/load_profile.hpp"

namespace ehsim {

struct DutyCyclePlan {
    double t_a = 0.0;
    double t_s = 0.0;
    double period = 0.0;  ///< t_a + t_s
    double e_deva = 0.0;
    double e_devs = 0.0;
    double p_harv = 0.0;
    double e_harv = 0.0;  ///< p_harv * period
    double margin = 0.0;  ///< e_harv - (e_deva + e_devs)
    bool feasible = false;
};

/// Evaluates the per-period energy balance at constant harvested power.
[[nodiscard]] DutyCyclePlan check_feasibility(double p_harv, const LoadProfile& profile, double t_s);

/// Minimal sleep time for which check_feasibility() reports feasible.
/// Returns 0 when the active cycle alone is already covered.
/// Throws NeverFeasibleError when p_harv does not exceed the sleep power.
[[nodiscard]] double solve_sleep_time(double p_harv, const LoadProfile& profile);

/// Harvested power that makes the schedule with sleep time t_s balance exactly.
[[nodiscard]] double harvest_power_oracle(const LoadProfile& profile, double t_s);

/// Piecewise-constant power over time: (start time, watts) pairs, first start at 0,
/// strictly increasing starts; the last value holds until the horizon.
struct PiecewisePower {
    std::vector<std::pair<double, double>> segments;

    [[nodiscard]] static PiecewisePower constant(double watts) { return {{{0.0, watts}}}; }
    [[nodiscard]] double at(double t) const;
    void validate() const;
};

struct EnergyBudget {
    double e_buf = 0.0;    ///< minimal buffer energy [J]
    double horizon = 0.0;  ///< [s]

    /// Checks e_buf >= 0, horizon >= 0 and e_buf <= C v0^2 / 2.
    void validate(double capacitance, double initial_voltage) const;
};

struct BufferedFeasibility {
    bool feasible = true;
    std::optional<double> first_violation;  ///< earliest t with negative slack
    double min_slack = 0.0;                 ///< min over [0, horizon] of the running balance [J]
};

/// Checks E_buf + int_0^T P_harv - int_0^T P_dev >= 0 for every T in [0, horizon].
[[nodiscard]] BufferedFeasibility check_buffered_feasibility(const EnergyBudget& budget,
                                                             const PiecewisePower& harvest,
                                                             const PiecewisePower& device);

/// Load power of `cycles` consecutive duty cycles of the profile with sleep time t_s.
[[nodiscard]] PiecewisePower duty_cycle_power(const LoadProfile& profile, double t_s, int cycles = 1);

}  // namespace ehsim
