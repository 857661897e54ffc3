#include "ehsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehsim/errors.hpp"

namespace ehsim {

DutyCyclePlan check_feasibility(double p_harv, const LoadProfile& profile, double t_s) {
    if (!(p_harv >= 0.0)) throw DomainError("check_feasibility: p_harv must be >= 0");
    if (!(t_s >= 0.0)) throw DomainError("check_feasibility: t_s must be >= 0");
    DutyCyclePlan plan;
    plan.t_a = profile.active_duration();
    plan.t_s = t_s;
    plan.period = plan.t_a + t_s;
    plan.e_deva = active_cycle_energy(profile);
    plan.e_devs = sleep_energy(profile, t_s);
    plan.p_harv = p_harv;
    plan.e_harv = p_harv * plan.period;
    plan.margin = plan.e_harv - (plan.e_deva + plan.e_devs);
    plan.feasible = plan.margin >= 0.0;
    return plan;
}

double solve_sleep_time(double p_harv, const LoadProfile& profile) {
    if (!(p_harv >= 0.0)) throw DomainError("solve_sleep_time: p_harv must be >= 0");
    const double t_a = profile.active_duration();
    const double e_deva = active_cycle_energy(profile);
    if (p_harv * t_a >= e_deva) return 0.0;
    const double p_devs = profile.sleep_power();
    if (p_harv <= p_devs) {
        throw NeverFeasibleError("never feasible: harvested power does not exceed the sleep power");
    }
    double t_s = (e_deva - p_harv * t_a) / (p_harv - p_devs);
    // Snap to the smallest representable T_s near the root whose margin is non-negative.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 64 && !check_feasibility(p_harv, profile, t_s).feasible; ++i) {
        t_s = std::nextafter(t_s, kInf);
    }
    for (int i = 0; i < 64; ++i) {
        const double lower = std::nextafter(t_s, 0.0);
        if (lower < 0.0 || !check_feasibility(p_harv, profile, lower).feasible) break;
        t_s = lower;
    }
    return t_s;
}

double harvest_power_oracle(const LoadProfile& profile, double t_s) {
    if (!(t_s > 0.0)) throw DomainError("harvest_power_oracle: t_s must be > 0");
    return (active_cycle_energy(profile) + sleep_energy(profile, t_s)) / (profile.active_duration() + t_s);
}

double PiecewisePower::at(double t) const {
    double value = 0.0;
    for (const auto& [start, watts] : segments) {
        if (start > t) break;
        value = watts;
    }
    return value;
}

void PiecewisePower::validate() const {
    if (segments.empty() || segments.front().first != 0.0) {
        throw ConfigError("piecewise power: first segment must start at 0");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!std::isfinite(segments[i].second)) throw ConfigError("piecewise power: non-finite value");
        if (i > 0 && !(segments[i].first > segments[i - 1].first)) {
            throw ConfigError("piecewise power: segment starts must be strictly increasing");
        }
    }
}

void EnergyBudget::validate(double capacitance, double initial_voltage) const {
    if (!(e_buf >= 0.0)) throw ConfigError("energy budget: E_buf must be >= 0");
    if (!(horizon >= 0.0)) throw ConfigError("energy budget: horizon must be >= 0");
    if (e_buf > 0.5 * capacitance * initial_voltage * initial_voltage) {
        throw ConfigError("energy budget: E_buf exceeds the energy stored at the initial voltage");
    }
}

BufferedFeasibility check_buffered_feasibility(const EnergyBudget& budget, const PiecewisePower& harvest,
                                               const PiecewisePower& device) {
    harvest.validate();
    device.validate();

    std::vector<double> knots{0.0, budget.horizon};
    for (const auto* f : {&harvest, &device}) {
        for (const auto& [start, watts] : f->segments) {
            if (start < budget.horizon) knots.push_back(start);
        }
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    // The running balance is piecewise linear, so its extrema sit on the knots.
    constexpr double kSlackTolerance = 1e-12;
    BufferedFeasibility result;
    double slack = budget.e_buf;
    result.min_slack = slack;
    if (slack < -kSlackTolerance) {
        result.feasible = false;
        result.first_violation = 0.0;
        return result;
    }
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double t0 = knots[i];
        const double t1 = knots[i + 1];
        const double rate = harvest.at(t0) - device.at(t0);
        const double end = slack + rate * (t1 - t0);
        result.min_slack = std::min(result.min_slack, end);
        if (end < -kSlackTolerance) {
            result.feasible = false;
            result.first_violation = t0 + std::max(slack, 0.0) / -rate;
            return result;
        }
        slack = end;
    }
    return result;
}

PiecewisePower duty_cycle_power(const LoadProfile& profile, double t_s, int cycles) {
    if (!(t_s >= 0.0)) throw DomainError("duty_cycle_power: t_s must be >= 0");
    PiecewisePower out;
    double t = 0.0;
    for (int c = 0; c < cycles; ++c) {
        for (const auto& phase : profile.phases) {
            out.segments.emplace_back(t, phase_power(phase));
            t += phase.duration;
        }
        if (t_s > 0.0) {
            out.segments.emplace_back(t, profile.sleep_power());
            t += t_s;
        }
    }
    return out;
}

}  // namespace ehsim
