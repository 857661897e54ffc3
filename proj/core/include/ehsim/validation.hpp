#pragma once

// Model-vs-measurement comparison of supercapacitor voltage traces.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ehsim/circuit.hpp"
#include "ehsim/engine.hpp"

namespace ehsim {

struct VoltageSample {
    double t = 0.0;    ///< [s]
    double v_c = 0.0;  ///< [V]

    friend bool operator==(const VoltageSample&, const VoltageSample&) = default;
};

struct MeasuredMetadata {
    std::optional<double> lux_nominal;
    std::optional<double> lux_tolerance;
    std::string label;
};

struct MeasuredTrace {
    std::vector<VoltageSample> records;  ///< strictly increasing t, v_c >= 0
    MeasuredMetadata metadata;

    void validate() const;
};

/// Reads a measured voltage trace from CSV.
///
/// Accepted layout: optional "# key=value" comment lines (lux_nominal,
/// lux_tolerance, label), an optional header, then rows of numbers. With a
/// header containing t_s and v_c_V (e.g. an exported simulation trace) those
/// columns are used; otherwise the first two. Throws ParseError with the
/// offending row (1-based line number) and column.
[[nodiscard]] MeasuredTrace ingest(std::istream& in);
[[nodiscard]] MeasuredTrace ingest_file(const std::string& path);

/// (t, V_c) projection of a simulated trace.
[[nodiscard]] MeasuredTrace voltage_series(const SimTrace& trace);

enum class EnergyDeviationAt {
    Horizon,  ///< stored-energy deviation at the end of the common interval
    TimeMax,  ///< largest deviation over the common interval
};

struct CompareOptions {
    EnergyDeviationAt energy_deviation = EnergyDeviationAt::Horizon;
};

struct ComparisonReport {
    double max_abs_dv = 0.0;            ///< [V]
    double dv_at_horizon = 0.0;         ///< |V_sim - V_meas| at the horizon [V]
    double energy_deviation_pct = 0.0;  ///< |E_sim - E_meas| / E_meas * 100, E = C V^2 / 2
    double rms_dv = 0.0;                ///< time-weighted RMS of V_sim - V_meas [V]
    double t_start = 0.0;               ///< start of the common interval [s]
    double horizon = 0.0;               ///< end of the common interval [s]
    double stored_energy_measured = 0.0;   ///< at the horizon [J]
    double stored_energy_simulated = 0.0;  ///< at the horizon [J]
};

/// Both traces are linearly interpolated onto the union of their sample
/// times inside the common interval. Throws NoOverlapError when the time
/// ranges do not intersect.
[[nodiscard]] ComparisonReport compare(const MeasuredTrace& simulated, const MeasuredTrace& measured,
                                       const CircuitParams& params, const CompareOptions& options = {});
[[nodiscard]] ComparisonReport compare(const SimTrace& simulated, const MeasuredTrace& measured,
                                       const CircuitParams& params, const CompareOptions& options = {});

enum class FitParameter { WPm, LeakageResistance, HarvestScale };

struct FreeParameter {
    FitParameter which = FitParameter::WPm;
    double lower = 0.0;
    double upper = 0.0;
};

struct FitSpec {
    std::vector<FreeParameter> free;
    int grid_points = 11;  ///< per parameter and level, >= 2
    int refinements = 3;   ///< zoom levels, >= 1
};

struct FitResult {
    ScenarioConfig config;      ///< base config with the fitted values applied
    ComparisonReport report;    ///< of the fitted config
    std::vector<double> values;      ///< fitted values, aligned with FitSpec::free
    std::vector<double> resolution;  ///< final grid step per parameter
};

/// Coordinate-descent grid search minimising rms_dv. Each level scans every
/// free parameter on an evenly spaced grid (others held fixed) and narrows its
/// range to one grid step around the best point.
[[nodiscard]] FitResult fit_parameters(const MeasuredTrace& measured, const ScenarioConfig& base,
                                       const FitSpec& spec);

[[nodiscard]] std::string to_string(FitParameter which);

void write_report_json(std::ostream& out, const ComparisonReport& report, int indent = 2);
void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_report_table(std::ostream& out, const ComparisonReport& report);

}  // namespace ehsim
