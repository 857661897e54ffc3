#include "ehsim/load_profile.hpp"

#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "ehsim/errors.hpp"

namespace ehsim {

namespace {

constexpr std::array<std::pair<LoadState, std::string_view>, 6> kNames{{
    {LoadState::SensorsReading, "SensorsReading"},
    {LoadState::BleAdvertising, "BleAdvertising"},
    {LoadState::DataExchange, "DataExchange"},
    {LoadState::Sleep, "Sleep"},
    {LoadState::Off, "Off"},
    {LoadState::ColdStart, "ColdStart"},
}};

}  // namespace

std::string_view to_string(LoadState state) noexcept {
    for (const auto& [s, name] : kNames) {
        if (s == state) return name;
    }
    return "Unknown";
}

std::optional<LoadState> parse_load_state(std::string_view name) noexcept {
    for (const auto& [s, n] : kNames) {
        if (n == name) return s;
    }
    return std::nullopt;
}

bool is_active(LoadState state) noexcept {
    return state == LoadState::SensorsReading || state == LoadState::BleAdvertising ||
           state == LoadState::DataExchange;
}

double phase_power(const LoadPhase& phase) noexcept {
    if (phase.name == LoadState::Off) return 0.0;
    return phase.current * phase.operational_voltage;
}

double phase_energy(const LoadPhase& phase) noexcept { return phase_power(phase) * phase.duration; }

void LoadProfile::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("load profile: " + msg); };
    if (phases.empty()) fail("at least one active phase is required");
    if (!(operational_voltage > 0.0) || !std::isfinite(operational_voltage)) {
        fail("operational voltage must be > 0");
    }
    if (!(sleep_current >= 0.0) || !std::isfinite(sleep_current)) fail("sleep current must be >= 0");
    for (std::size_t i = 0; i < phases.size(); ++i) {
        const auto& p = phases[i];
        const std::string label{to_string(p.name)};
        if (!is_active(p.name)) fail(label + " is not an active phase");
        if (i > 0 && static_cast<int>(p.name) <= static_cast<int>(phases[i - 1].name)) {
            fail("phases must follow SensorsReading -> BleAdvertising -> DataExchange, each at most once");
        }
        if (!(p.current >= 0.0) || !std::isfinite(p.current)) fail(label + " current must be >= 0");
        if (!(p.duration > 0.0) || !std::isfinite(p.duration)) fail(label + " duration must be > 0");
        if (!(p.operational_voltage > 0.0)) fail(label + " operational voltage must be > 0");
    }
}

double LoadProfile::active_duration() const noexcept {
    double total = 0.0;
    for (const auto& p : phases) total += p.duration;
    return total;
}

LoadProfile LoadProfile::table_one() {
    constexpr double volts = 3.3;
    return LoadProfile{
        .phases = {{LoadState::SensorsReading, 7.550e-3, 0.260, volts},
                   {LoadState::BleAdvertising, 0.400e-3, 2.000, volts},
                   {LoadState::DataExchange, 0.225e-3, 3.000, volts}},
        .sleep_current = 0.070e-3,
        .operational_voltage = volts,
    };
}

double active_cycle_energy(const LoadProfile& profile) noexcept {
    double total = 0.0;
    for (const auto& p : profile.phases) total += phase_energy(p);
    return total;
}

double sleep_energy(const LoadProfile& profile, double t_s) {
    if (!(t_s >= 0.0)) throw DomainError("sleep_energy: t_s must be >= 0");
    return profile.sleep_power() * t_s;
}

}  // namespace ehsim
