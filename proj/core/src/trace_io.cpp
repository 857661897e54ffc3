#include "ehsim/trace_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <system_error>

#include <json.hpp>

#include "ehsim/errors.hpp"

namespace ehsim {

using nlohmann::json;

std::string format_double(double value) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) return "nan";
    return {buf, end};
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << kTraceCsvHeader << '\n';
    for (const auto& r : trace.records) {
        out << format_double(r.t) << ',' << format_double(r.v_c) << ',' << to_string(r.load_state) << ','
            << (r.mode.pm_on ? 1 : 0) << ',' << (r.mode.eh_connected ? 1 : 0) << ',' << format_double(r.p_eh)
            << ',' << format_double(r.p_cl) << ',' << format_double(r.i_c) << '\n';
    }
}

void write_trace_json(std::ostream& out, const SimTrace& trace, int indent) {
    json records = json::array();
    for (const auto& r : trace.records) {
        records.push_back({{"t_s", r.t},
                           {"v_c_V", r.v_c},
                           {"load_state", to_string(r.load_state)},
                           {"pm_on", r.mode.pm_on},
                           {"eh_connected", r.mode.eh_connected},
                           {"p_eh_W", r.p_eh},
                           {"p_cl_W", r.p_cl},
                           {"i_c_A", r.i_c}});
    }
    json events = json::array();
    for (const auto& e : trace.events) {
        events.push_back({{"t_s", e.t}, {"kind", to_string(e.kind)}, {"v_c_V", e.v_c}});
    }
    json doc = {{"leakage_in_connected_modes", trace.leakage_in_connected_modes},
                {"records", std::move(records)},
                {"events", std::move(events)}};
    out << doc.dump(indent) << '\n';
}

SimTrace read_trace_json(std::istream& in) {
    SimTrace trace;
    try {
        const json doc = json::parse(in);
        trace.leakage_in_connected_modes = doc.at("leakage_in_connected_modes").get<bool>();
        for (const auto& r : doc.at("records")) {
            const auto state = parse_load_state(r.at("load_state").get<std::string>());
            if (!state) throw ConfigError("trace: unknown load_state " + r.at("load_state").dump());
            trace.records.push_back({r.at("t_s").get<double>(),
                                     r.at("v_c_V").get<double>(),
                                     *state,
                                     {r.at("pm_on").get<bool>(), r.at("eh_connected").get<bool>()},
                                     r.at("p_eh_W").get<double>(),
                                     r.at("p_cl_W").get<double>(),
                                     r.at("i_c_A").get<double>()});
        }
        for (const auto& e : doc.at("events")) {
            const auto kind = parse_event_kind(e.at("kind").get<std::string>());
            if (!kind) throw ConfigError("trace: unknown event kind " + e.at("kind").dump());
            trace.events.push_back({e.at("t_s").get<double>(), *kind, e.at("v_c_V").get<double>()});
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("trace: ") + e.what());
    }
    return trace;
}

}  // namespace ehsim
