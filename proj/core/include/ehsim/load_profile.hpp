#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace ehsim {

/// Operational states of the node. The first three are the active cycle,
/// in the order the firmware runs them.
enum class LoadState {
    SensorsReading,
    BleAdvertising,
    DataExchange,
    Sleep,
    Off,
    ColdStart,  ///< reactivation transient after an OFF excursion
};

[[nodiscard]] std::string_view to_string(LoadState state) noexcept;
[[nodiscard]] std::optional<LoadState> parse_load_state(std::string_view name) noexcept;
[[nodiscard]] bool is_active(LoadState state) noexcept;

struct LoadPhase {
    LoadState name = LoadState::Sleep;
    double current = 0.0;              ///< [A]
    double duration = 0.0;             ///< [s]
    double operational_voltage = 3.3;  ///< [V]
};

/// Power dissipated by the load in this phase. Always 0 for Off.
[[nodiscard]] double phase_power(const LoadPhase& phase) noexcept;
[[nodiscard]] double phase_energy(const LoadPhase& phase) noexcept;

struct LoadProfile {
    std::vector<LoadPhase> phases;     ///< active phases, in cycle order
    double sleep_current = 0.0;        ///< [A]
    double operational_voltage = 3.3;  ///< [V]

    /// Throws ConfigError unless phases are non-empty, active, strictly ordered
    /// SensorsReading -> BleAdvertising -> DataExchange, with positive durations.
    void validate() const;

    /// T_a: sum of active phase durations.
    [[nodiscard]] double active_duration() const noexcept;
    [[nodiscard]] double sleep_power() const noexcept { return sleep_current * operational_voltage; }
    [[nodiscard]] LoadPhase sleep_phase(double t_s) const noexcept {
        return {LoadState::Sleep, sleep_current, t_s, operational_voltage};
    }

    /// Measured consumption profile of the BLE environmental sensing prototype
    /// at 3.3 V: sensing 7.550 mA / 0.260 s, advertising 0.400 mA / 2.000 s,
    /// data exchange 0.225 mA / 3.000 s, sleep 0.070 mA.
    [[nodiscard]] static LoadProfile table_one();
};

/// E_deva: energy of one active cycle.
[[nodiscard]] double active_cycle_energy(const LoadProfile& profile) noexcept;

/// E_devs(t_s): energy spent sleeping for t_s seconds.
[[nodiscard]] double sleep_energy(const LoadProfile& profile, double t_s);

}  // namespace ehsim
