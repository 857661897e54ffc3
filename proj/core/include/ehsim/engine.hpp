#pragma once

// =============================================================================
// Event-driven scenario simulator.
//
// The scenario is cut into intervals over which the harvested power, the load
// power and the circuit mode are constant; within each interval V_c follows a
// single closed-form law. Interval boundaries are load phase ends, lux changes
// and threshold crossings (V_on, V_off, E_eh), the latter located with the
// analytic inverse laws.
// =============================================================================

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ehsim/circuit.hpp"
#include "ehsim/harvest.hpp"
#include "ehsim/load_profile.hpp"

namespace ehsim {

enum class EventKind {
    VOn,
    VOff,
    EehClamp,
    EehRelease,
    PhaseChange,
    LuxChange,
    ColdStartBegin,
    ColdStartEnd,
};

[[nodiscard]] std::string_view to_string(EventKind kind) noexcept;
[[nodiscard]] std::optional<EventKind> parse_event_kind(std::string_view name) noexcept;

struct TraceRecord {
    double t = 0.0;    ///< [s]
    double v_c = 0.0;  ///< [V]
    LoadState load_state = LoadState::Off;
    CircuitMode mode;
    double p_eh = 0.0;  ///< power delivered by the harvester [W]
    double p_cl = 0.0;  ///< load power [W]
    double i_c = 0.0;   ///< capacitor current, positive while charging [A]

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceEvent {
    double t = 0.0;
    EventKind kind = EventKind::PhaseChange;
    double v_c = 0.0;  ///< capacitor voltage at the event

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct SimTrace {
    std::vector<TraceRecord> records;  ///< strictly increasing t; post-event state at event times
    std::vector<TraceEvent> events;
    /// Whether the connected-mode segments included the leakage term.
    bool leakage_in_connected_modes = false;

    friend bool operator==(const SimTrace&, const SimTrace&) = default;
};

struct SimOptions {
    bool randomize_advertising = false;  ///< draw each BLE advertising time from U(0, 4] s
    std::uint64_t seed = 0;
    bool leakage_in_connected_modes = false;
};

struct ScenarioConfig {
    CircuitParams circuit;
    HarvestModel harvest;
    LoadProfile load;
    IlluminationProfile illumination;
    double initial_voltage = 0.0;
    std::optional<double> sleep_time;  ///< nullopt: re-solved by the planner for every lux segment
    double record_interval = 0.1;      ///< [s]
    SimOptions options;

    void validate() const;
};

/// Runs one scenario over [0, horizon]. Deterministic for a given config.
[[nodiscard]] SimTrace run(const ScenarioConfig& config);

struct SweepResult {
    std::optional<SimTrace> trace;
    std::string error;  ///< set when the run failed

    [[nodiscard]] bool ok() const noexcept { return trace.has_value(); }
};

/// Runs every config, in parallel when possible; results are index-aligned with
/// the input and a failing config does not abort the others.
/// max_threads == 0 uses the hardware concurrency.
[[nodiscard]] std::vector<SweepResult> sweep(const std::vector<ScenarioConfig>& configs,
                                             unsigned max_threads = 0);

struct EnergyBalance {
    double harvested = 0.0;
    double consumed = 0.0;  ///< capacitor-side draw, w_pm * load energy
    double leaked = 0.0;
    double delta_stored = 0.0;  ///< C (V_end^2 - V_start^2) / 2

    /// harvested - consumed - leaked - delta_stored; zero up to rounding.
    [[nodiscard]] double imbalance() const noexcept { return harvested - consumed - leaked - delta_stored; }
};

/// Integrates the trace's power flows segment by segment.
[[nodiscard]] EnergyBalance energy_balance(const SimTrace& trace, const CircuitParams& params);

struct PeriodChange {
    double t_start = 0.0;
    double t_end = 0.0;
    double v_start = 0.0;
    double v_end = 0.0;

    [[nodiscard]] double dv() const noexcept { return v_end - v_start; }
    [[nodiscard]] double period() const noexcept { return t_end - t_start; }
};

/// Times at which an active cycle begins (entry into an active phase from a non-active state).
[[nodiscard]] std::vector<double> cycle_starts(const SimTrace& trace);

/// V_c change between consecutive cycle starts.
[[nodiscard]] std::vector<PeriodChange> period_changes(const SimTrace& trace);

}  // namespace ehsim
