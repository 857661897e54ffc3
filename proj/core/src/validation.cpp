#include "ehsim/validation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string_view>

#include <json.hpp>

#include "ehsim/errors.hpp"
#include "ehsim/trace_io.hpp"

namespace ehsim {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::optional<double> to_number(std::string_view field) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

void read_metadata(std::string_view comment, MeasuredMetadata& meta) {
    const auto eq = comment.find('=');
    if (eq == std::string_view::npos) return;
    const auto key = trim(comment.substr(0, eq));
    const auto value = trim(comment.substr(eq + 1));
    if (key == "label") {
        meta.label = std::string(value);
    } else if (key == "lux_nominal") {
        meta.lux_nominal = to_number(value);
    } else if (key == "lux_tolerance") {
        meta.lux_tolerance = to_number(value);
    }
}

// Linear interpolation of a strictly increasing series at t inside its range.
double interpolate(const std::vector<VoltageSample>& series, double t) {
    const auto it = std::lower_bound(series.begin(), series.end(), t,
                                     [](const VoltageSample& s, double x) { return s.t < x; });
    if (it == series.end()) return series.back().v_c;
    if (it->t == t || it == series.begin()) return it->v_c;
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.v_c + (b.v_c - a.v_c) * (t - a.t) / (b.t - a.t);
}

double energy_deviation_pct(double v_sim, double v_meas) {
    const double e_sim = v_sim * v_sim;
    const double e_meas = v_meas * v_meas;
    if (e_meas == 0.0) return e_sim == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(e_sim - e_meas) / e_meas * 100.0;
}

void apply(ScenarioConfig& cfg, FitParameter which, double value) {
    switch (which) {
        case FitParameter::WPm: cfg.circuit.w_pm = value; break;
        case FitParameter::LeakageResistance: cfg.circuit.leakage_resistance = value; break;
        case FitParameter::HarvestScale: cfg.harvest.scale = value; break;
    }
}

double current_value(const ScenarioConfig& cfg, FitParameter which) {
    switch (which) {
        case FitParameter::WPm: return cfg.circuit.w_pm;
        case FitParameter::LeakageResistance: return cfg.circuit.leakage_resistance;
        case FitParameter::HarvestScale: return cfg.harvest.scale;
    }
    return 0.0;
}

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

void MeasuredTrace::validate() const {
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].v_c >= 0.0)) throw ConfigError("measured trace: negative voltage at index " + std::to_string(i));
        if (i > 0 && !(records[i].t > records[i - 1].t)) {
            throw ConfigError("measured trace: time not strictly increasing at index " + std::to_string(i));
        }
    }
}

MeasuredTrace ingest(std::istream& in) {
    MeasuredTrace trace;
    std::string line;
    std::size_t row = 0;
    bool seen_first = false;
    std::size_t t_col = 0;
    std::size_t v_col = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            read_metadata(text.substr(1), trace.metadata);
            continue;
        }
        const auto fields = split_fields(text);
        if (!seen_first) {
            seen_first = true;
            if (!to_number(fields[0])) {
                const auto t_it = std::find(fields.begin(), fields.end(), "t_s");
                const auto v_it = std::find(fields.begin(), fields.end(), "v_c_V");
                if (t_it != fields.end() && v_it != fields.end()) {
                    t_col = static_cast<std::size_t>(t_it - fields.begin());
                    v_col = static_cast<std::size_t>(v_it - fields.begin());
                } else if (fields.size() < 2) {
                    throw ParseError(row, 0, "header needs at least two columns");
                }
                continue;
            }
        }
        const std::size_t needed = std::max(t_col, v_col) + 1;
        if (fields.size() < needed) {
            throw ParseError(row, fields.size() + 1, "expected at least " + std::to_string(needed) + " columns");
        }
        const auto t = to_number(fields[t_col]);
        if (!t) throw ParseError(row, t_col + 1, "time is not a number");
        const auto v = to_number(fields[v_col]);
        if (!v) throw ParseError(row, v_col + 1, "voltage is not a number");
        if (*v < 0.0) throw ParseError(row, v_col + 1, "negative voltage");
        if (!trace.records.empty() && !(*t > trace.records.back().t)) {
            throw ParseError(row, t_col + 1, "time is not strictly increasing");
        }
        trace.records.push_back({*t, *v});
    }
    if (trace.records.empty()) throw ParseError(row, 0, "no data rows (empty file)");
    return trace;
}

MeasuredTrace ingest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open measured trace '" + path + "'");
    return ingest(in);
}

MeasuredTrace voltage_series(const SimTrace& trace) {
    MeasuredTrace out;
    out.records.reserve(trace.records.size());
    for (const auto& r : trace.records) out.records.push_back({r.t, r.v_c});
    return out;
}

ComparisonReport compare(const MeasuredTrace& simulated, const MeasuredTrace& measured, const CircuitParams& params,
                         const CompareOptions& options) {
    const auto& sim = simulated.records;
    const auto& meas = measured.records;
    if (sim.empty() || meas.empty()) throw NoOverlapError("compare: a trace is empty");
    const double lo = std::max(sim.front().t, meas.front().t);
    const double hi = std::min(sim.back().t, meas.back().t);
    if (lo > hi) throw NoOverlapError("compare: traces do not overlap in time");

    std::vector<double> grid{lo, hi};
    for (const auto* series : {&sim, &meas}) {
        for (const auto& s : *series) {
            if (s.t > lo && s.t < hi) grid.push_back(s.t);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    ComparisonReport report;
    report.t_start = lo;
    report.horizon = hi;
    double sq_integral = 0.0;
    double prev_dv = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double vs = interpolate(sim, grid[i]);
        const double vm = interpolate(meas, grid[i]);
        const double dv = vs - vm;
        report.max_abs_dv = std::max(report.max_abs_dv, std::abs(dv));
        if (options.energy_deviation == EnergyDeviationAt::TimeMax) {
            report.energy_deviation_pct = std::max(report.energy_deviation_pct, energy_deviation_pct(vs, vm));
        }
        if (i > 0) {
            // dv is linear between grid points.
            const double h = grid[i] - grid[i - 1];
            sq_integral += h * (prev_dv * prev_dv + prev_dv * dv + dv * dv) / 3.0;
        }
        prev_dv = dv;
    }
    const double vs_end = interpolate(sim, hi);
    const double vm_end = interpolate(meas, hi);
    report.dv_at_horizon = std::abs(vs_end - vm_end);
    report.rms_dv = hi > lo ? std::sqrt(sq_integral / (hi - lo)) : std::abs(prev_dv);
    report.stored_energy_simulated = 0.5 * params.capacitance * vs_end * vs_end;
    report.stored_energy_measured = 0.5 * params.capacitance * vm_end * vm_end;
    if (options.energy_deviation == EnergyDeviationAt::Horizon) {
        report.energy_deviation_pct = energy_deviation_pct(vs_end, vm_end);
    }
    return report;
}

ComparisonReport compare(const SimTrace& simulated, const MeasuredTrace& measured, const CircuitParams& params,
                         const CompareOptions& options) {
    return compare(voltage_series(simulated), measured, params, options);
}

std::string to_string(FitParameter which) {
    switch (which) {
        case FitParameter::WPm: return "w_pm";
        case FitParameter::LeakageResistance: return "leakage_resistance";
        case FitParameter::HarvestScale: return "harvest_scale";
    }
    return "unknown";
}

FitResult fit_parameters(const MeasuredTrace& measured, const ScenarioConfig& base, const FitSpec& spec) {
    if (spec.free.empty()) throw ConfigError("fit: at least one free parameter is required");
    if (spec.grid_points < 2) throw ConfigError("fit: grid_points must be >= 2");
    if (spec.refinements < 1) throw ConfigError("fit: refinements must be >= 1");
    for (const auto& p : spec.free) {
        if (!(p.lower < p.upper) || !std::isfinite(p.lower) || !std::isfinite(p.upper)) {
            throw ConfigError("fit: degenerate range for " + to_string(p.which) + " (lower must be < upper)");
        }
    }
    measured.validate();

    const std::size_t n = spec.free.size();
    ScenarioConfig current = base;
    std::vector<double> lower(n);
    std::vector<double> upper(n);
    FitResult result;
    result.values.resize(n);
    result.resolution.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        lower[k] = spec.free[k].lower;
        upper[k] = spec.free[k].upper;
        const double start = current_value(base, spec.free[k].which);
        result.values[k] = (start >= lower[k] && start <= upper[k]) ? start : 0.5 * (lower[k] + upper[k]);
        apply(current, spec.free[k].which, result.values[k]);
    }

    const auto points = static_cast<std::size_t>(spec.grid_points);
    for (int level = 0; level < spec.refinements; ++level) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto which = spec.free[k].which;
            const double step = (upper[k] - lower[k]) / static_cast<double>(points - 1);
            std::vector<double> grid(points);
            std::vector<ScenarioConfig> candidates(points, current);
            for (std::size_t j = 0; j < points; ++j) {
                grid[j] = j + 1 == points ? upper[k] : lower[k] + static_cast<double>(j) * step;
                apply(candidates[j], which, grid[j]);
            }
            const auto runs = sweep(candidates);
            double best_rms = std::numeric_limits<double>::infinity();
            std::size_t best = 0;
            for (std::size_t j = 0; j < points; ++j) {
                if (!runs[j].ok()) continue;
                double rms = std::numeric_limits<double>::infinity();
                try {
                    rms = compare(*runs[j].trace, measured, candidates[j].circuit).rms_dv;
                } catch (const NoOverlapError&) {
                }
                if (rms < best_rms) {
                    best_rms = rms;
                    best = j;
                }
            }
            if (!std::isfinite(best_rms)) throw SimulationError("fit: no grid point produced a comparable trace");
            result.values[k] = grid[best];
            result.resolution[k] = step;
            apply(current, which, grid[best]);
            lower[k] = std::max(spec.free[k].lower, grid[best] - step);
            upper[k] = std::min(spec.free[k].upper, grid[best] + step);
        }
    }
    result.config = current;
    result.report = compare(run(current), measured, current.circuit);
    return result;
}

void write_report_json(std::ostream& out, const ComparisonReport& r, int indent) {
    const nlohmann::json doc = {
        {"max_abs_dv_V", r.max_abs_dv},
        {"dv_at_horizon_V", r.dv_at_horizon},
        {"energy_deviation_pct", finite_or_null(r.energy_deviation_pct)},
        {"rms_dv_V", r.rms_dv},
        {"t_start_s", r.t_start},
        {"horizon_s", r.horizon},
        {"stored_energy_measured_J", r.stored_energy_measured},
        {"stored_energy_simulated_J", r.stored_energy_simulated},
    };
    out << doc.dump(indent) << '\n';
}

void write_report_csv(std::ostream& out, const ComparisonReport& r) {
    out << "max_abs_dv_V,dv_at_horizon_V,energy_deviation_pct,rms_dv_V,t_start_s,horizon_s,"
           "stored_energy_measured_J,stored_energy_simulated_J\n";
    out << format_double(r.max_abs_dv) << ',' << format_double(r.dv_at_horizon) << ','
        << format_double(r.energy_deviation_pct) << ',' << format_double(r.rms_dv) << ','
        << format_double(r.t_start) << ',' << format_double(r.horizon) << ','
        << format_double(r.stored_energy_measured) << ',' << format_double(r.stored_energy_simulated) << '\n';
}

void write_report_table(std::ostream& out, const ComparisonReport& r) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::left << std::setprecision(6);
    out << std::setw(28) << "common interval [s]" << r.t_start << " .. " << r.horizon << '\n';
    out << std::setw(28) << "max |dV| [V]" << r.max_abs_dv << '\n';
    out << std::setw(28) << "|dV| at horizon [V]" << r.dv_at_horizon << '\n';
    out << std::setw(28) << "rms dV [V]" << r.rms_dv << '\n';
    out << std::setw(28) << "stored energy sim/meas [J]" << r.stored_energy_simulated << " / "
        << r.stored_energy_measured << '\n';
    out << std::setw(28) << "energy deviation [%]" << r.energy_deviation_pct << '\n';
    out.flags(flags);
    out.precision(precision);
}

}  // namespace ehsim
