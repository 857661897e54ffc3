#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehsim/engine.hpp"
#include "ehsim/errors.hpp"
#include "ehsim/planner.hpp"
#include "ehsim/scenario_io.hpp"
#include "ehsim/trace_io.hpp"
#include "ehsim/validation.hpp"

namespace ehsim::cli {

namespace {

struct CommonOptions {
    std::string config;
    std::string out;
    std::string format;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
};

std::vector<Override> collect_overrides(const CommonOptions& opts) {
    std::vector<Override> overrides;
    for (const auto& s : opts.sets) overrides.push_back(parse_override(s));
    if (opts.seed) overrides.emplace_back("options.seed", std::to_string(*opts.seed));
    return overrides;
}

// Writes to the given path, or to `out` when the path is empty or "-".
template <typename Writer>
void write_output(const std::string& path, std::ostream& out, Writer&& writer) {
    if (path.empty() || path == "-") {
        writer(out);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    writer(file);
    if (!file) throw ConfigError("failed writing output file '" + path + "'");
}

void write_trace(std::ostream& os, const SimTrace& trace, const std::string& format) {
    if (format == "structured") {
        write_trace_json(os, trace);
    } else {
        write_trace_csv(os, trace);
    }
}

void print_summary(std::ostream& os, const SimTrace& trace) {
    std::map<std::string, int> counts;
    for (const auto& e : trace.events) ++counts[std::string(to_string(e.kind))];
    const auto periods = period_changes(trace);
    const auto flags = os.flags();
    const auto precision = os.precision();
    os << std::setprecision(6);
    os << "records: " << trace.records.size() << '\n';
    os << "final V_c: " << trace.records.back().v_c << " V at t = " << trace.records.back().t << " s\n";
    os << "events:";
    if (counts.empty()) os << " none";
    for (const auto& [kind, n] : counts) os << ' ' << kind << '=' << n;
    os << '\n';
    os << "periods completed: " << periods.size() << '\n';
    for (std::size_t i = 0; i < periods.size(); ++i) {
        os << "  period " << i + 1 << ": t = " << periods[i].t_start << " .. " << periods[i].t_end
           << " s (T = " << periods[i].period() << " s), dV = " << std::showpos << periods[i].dv()
           << std::noshowpos << " V\n";
    }
    os.flags(flags);
    os.precision(precision);
}

int cmd_plan(const CommonOptions& opts, std::ostream& out) {
    const auto request = parse_plan_request(load_document_text(opts.config), collect_overrides(opts));
    double t_s = 0.0;
    try {
        t_s = solve_sleep_time(request.p_harv, request.load);
    } catch (const NeverFeasibleError& e) {
        if (opts.format == "structured") {
            write_output(opts.out, out, [&](std::ostream& os) {
                os << nlohmann::json{{"feasible", false}, {"p_harv_W", request.p_harv}, {"reason", "never feasible"}}
                          .dump(2)
                   << '\n';
            });
        } else {
            out << "never feasible: harvested power " << request.p_harv
                << " W does not exceed the sleep power " << request.load.sleep_power() << " W\n";
        }
        return kInfeasible;
    }
    const DutyCyclePlan plan = check_feasibility(request.p_harv, request.load, t_s);
    write_output(opts.out, out, [&](std::ostream& os) {
        if (opts.format == "structured") {
            nlohmann::json doc = {{"t_a_s", plan.t_a},       {"t_s_s", plan.t_s},       {"period_s", plan.period},
                                  {"e_deva_J", plan.e_deva}, {"e_devs_J", plan.e_devs}, {"p_harv_W", plan.p_harv},
                                  {"e_harv_J", plan.e_harv}, {"margin_J", plan.margin}, {"feasible", plan.feasible}};
            if (request.lux) doc["lux"] = *request.lux;
            os << doc.dump(2) << '\n';
        } else if (opts.format == "csv") {
            os << "t_a_s,t_s_s,period_s,e_deva_J,e_devs_J,p_harv_W,e_harv_J,margin_J,feasible\n"
               << format_double(plan.t_a) << ',' << format_double(plan.t_s) << ',' << format_double(plan.period)
               << ',' << format_double(plan.e_deva) << ',' << format_double(plan.e_devs) << ','
               << format_double(plan.p_harv) << ',' << format_double(plan.e_harv) << ','
               << format_double(plan.margin) << ',' << (plan.feasible ? 1 : 0) << '\n';
        } else {
            os << std::setprecision(6);
            if (request.lux) os << "lux      " << *request.lux << " lx\n";
            os << "T_a      " << plan.t_a << " s\n"
               << "T_s      " << plan.t_s << " s\n"
               << "T        " << plan.period << " s\n"
               << "E_deva   " << plan.e_deva << " J\n"
               << "E_devs   " << plan.e_devs << " J\n"
               << "p_harv   " << plan.p_harv << " W\n"
               << "margin   " << plan.margin << " J\n"
               << "feasible " << (plan.feasible ? "yes" : "no") << '\n';
        }
    });
    return plan.feasible ? kOk : kInfeasible;
}

int cmd_simulate(const CommonOptions& opts, std::ostream& out, std::ostream& err) {
    const auto config = parse_scenario(load_document_text(opts.config), collect_overrides(opts));
    const SimTrace trace = run(config);
    const bool trace_to_stdout = opts.out == "-";
    if (!opts.out.empty()) write_output(opts.out, out, [&](std::ostream& os) { write_trace(os, trace, opts.format); });
    print_summary(trace_to_stdout ? err : out, trace);
    return kOk;
}

int cmd_sweep(const CommonOptions& opts, std::ostream& out) {
    const auto variants = parse_sweep(load_document_text(opts.config), collect_overrides(opts));
    std::vector<ScenarioConfig> configs;
    configs.reserve(variants.size());
    for (const auto& v : variants) configs.push_back(v.config);
    const auto results = sweep(configs);

    if (!opts.out.empty()) std::filesystem::create_directories(opts.out);
    int status = kOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        out << "== " << variants[i].name << '\n';
        if (!results[i].ok()) {
            out << "error: " << results[i].error << '\n';
            status = kError;
            continue;
        }
        if (!opts.out.empty()) {
            const auto ext = opts.format == "structured" ? ".json" : ".csv";
            const auto path = (std::filesystem::path(opts.out) / (variants[i].name + ext)).string();
            write_output(path, out, [&](std::ostream& os) { write_trace(os, *results[i].trace, opts.format); });
        }
        print_summary(out, *results[i].trace);
    }
    return status;
}

int cmd_validate(const CommonOptions& opts, const std::string& measured_path, double threshold,
                 std::ostream& out) {
    const auto config = parse_scenario(load_document_text(opts.config), collect_overrides(opts));
    const MeasuredTrace measured = ingest_file(measured_path);
    const ComparisonReport report = compare(run(config), measured, config.circuit);
    if (!opts.out.empty()) {
        write_output(opts.out, out, [&](std::ostream& os) {
            if (opts.format == "csv") {
                write_report_csv(os, report);
            } else {
                write_report_json(os, report);
            }
        });
    }
    if (opts.out != "-") write_report_table(out, report);
    const bool pass = report.energy_deviation_pct <= threshold;
    out << "threshold " << threshold << " %: " << (pass ? "pass" : "FAIL") << '\n';
    return pass ? kOk : kOverThreshold;
}

int cmd_presets(const std::string& show, std::ostream& out) {
    if (!show.empty()) {
        out << preset_document(show) << '\n';
        return kOk;
    }
    for (const auto& p : list_presets()) {
        out << p.name << " (" << p.kind << ")\n    " << p.description << '\n';
    }
    return kOk;
}

void add_common(CLI::App* sub, CommonOptions& opts, bool with_out, const std::string& default_format) {
    sub->add_option("--config", opts.config, "Scenario document path or preset:<name>")->required();
    if (with_out) sub->add_option("--out", opts.out, "Output path ('-' for standard output)");
    opts.format = default_format;
    sub->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"csv", "structured"}));
    sub->add_option("--set", opts.sets, "Override key=value (repeatable)")->allow_extra_args(false);
    sub->add_option("--seed", opts.seed, "Seed for randomized advertising");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Batteryless energy-harvesting node simulator and duty-cycle planner", "ehsim"};
    app.require_subcommand(1);

    CommonOptions plan_opts;
    auto* plan = app.add_subcommand("plan", "Solve the sleep interval for a load profile and harvested power");
    add_common(plan, plan_opts, true, "");
    plan->get_option("--format")->check(CLI::IsMember({"", "csv", "structured"}));

    CommonOptions sim_opts;
    auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its trace");
    add_common(simulate, sim_opts, true, "csv");

    CommonOptions sweep_opts;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every variant of a sweep document");
    add_common(sweep_cmd, sweep_opts, true, "csv");

    CommonOptions val_opts;
    std::string measured;
    double threshold = 1.0;
    auto* validate = app.add_subcommand("validate", "Compare a scenario against a measured voltage trace");
    add_common(validate, val_opts, true, "structured");
    validate->add_option("--measured", measured, "Measured trace CSV (t, v_c)")->required();
    validate->add_option("--threshold", threshold, "Energy deviation threshold [%]")->check(CLI::NonNegativeNumber);

    std::string show;
    auto* presets = app.add_subcommand("presets", "List built-in presets or print one");
    presets->add_option("name", show, "Preset to print");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kOk;
        }
        err << "error: " << e.what() << '\n';
        return kError;
    }

    try {
        if (plan->parsed()) return cmd_plan(plan_opts, out);
        if (simulate->parsed()) return cmd_simulate(sim_opts, out, err);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_opts, out);
        if (validate->parsed()) return cmd_validate(val_opts, measured, threshold, out);
        if (presets->parsed()) return cmd_presets(show, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace ehsim::cli
