#include "ehsim/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "ehsim/errors.hpp"
#include "ehsim/harvest.hpp"

namespace ehsim {

using nlohmann::json;

namespace {

constexpr std::string_view kPresetPrefix = "preset:";

// Placeholder thresholds for the prototype: R_c, V_on, V_off and E_eh were never
// characterised. Override them for real hardware.
constexpr double kPrototypeCapacitance = 0.4;
constexpr double kPlaceholderLeakage = 1.0e6;
constexpr double kPlaceholderVOn = 3.1;
constexpr double kPlaceholderVOff = 2.8;
constexpr double kPrototypeInitialVoltage = 3.3;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            fail("unknown key '" + key + "' in " + where);
        }
    }
}

const json& required(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

double number(const json& value, const std::string& what) {
    if (!value.is_number()) fail(what + " must be a number");
    return value.get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
    return number(required(obj, key, where), where + "." + key);
}

double optional_number(const json& obj, const char* key, double fallback, const std::string& where) {
    const auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, where + "." + key);
}

bool optional_bool(const json& obj, const char* key, bool fallback, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) fail(where + "." + key + " must be true or false");
    return it->get<bool>();
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("invalid JSON: ") + e.what());
    }
}

// -- presets -------------------------------------------------------------------

json load_preset_json(std::string_view name) {
    if (name != "table1") fail("unknown load preset '" + std::string(name) + "'");
    const auto profile = LoadProfile::table_one();
    json phases = json::array();
    for (const auto& p : profile.phases) {
        phases.push_back({{"name", to_string(p.name)}, {"current_A", p.current}, {"duration_s", p.duration}});
    }
    return {{"operational_voltage_V", profile.operational_voltage},
            {"sleep_current_A", profile.sleep_current},
            {"phases", std::move(phases)}};
}

json harvest_to_json(const HarvestModel& model) {
    json points = json::array();
    for (const auto& p : model.points) points.push_back({{"lux", p.lux}, {"power_W", p.power}});
    return {{"E_eh_V", model.e_eh},
            {"above_range", model.above_range == AboveRange::Clamp ? "clamp" : "extrapolate"},
            {"scale", model.scale},
            {"points", std::move(points)}};
}

json harvest_preset_json(std::string_view name) {
    if (name != "table1-oracle") fail("unknown harvest preset '" + std::string(name) + "'");
    return harvest_to_json(HarvestModel::table_one_oracle());
}

json prototype_scenario(double lux, double sleep_time) {
    return {
        {"circuit",
         {{"capacitance_F", kPrototypeCapacitance},
          {"leakage_resistance_ohm", kPlaceholderLeakage},
          {"w_pm", 1.0},
          {"E_pm_V", 3.3},
          {"V_on_V", kPlaceholderVOn},
          {"V_off_V", kPlaceholderVOff},
          {"coldstart_energy_J", 0.0},
          {"coldstart_duration_s", 0.0},
          {"eh_reconnect_hysteresis_V", 0.05}}},
        {"harvest", harvest_preset_json("table1-oracle")},
        {"load", load_preset_json("table1")},
        {"illumination", {{"horizon_s", 800.0}, {"segments", json::array({{{"start_s", 0.0}, {"lux", lux}}})}}},
        {"initial_voltage_V", kPrototypeInitialVoltage},
        {"sleep_time_s", sleep_time},
        {"record_interval_s", 0.1},
        {"options", {{"randomize_advertising", false}, {"seed", 0}, {"leakage_in_connected_modes", false}}},
    };
}

json preset_json(std::string_view name) {
    if (name == "prototype-300lx") return prototype_scenario(300.0, 209.9);
    if (name == "prototype-500lx") return prototype_scenario(500.0, 42.44);
    if (name == "prototype-700lx") return prototype_scenario(700.0, 18.10);
    if (name == "table1") return load_preset_json(name);
    if (name == "table1-oracle") return harvest_preset_json(name);
    fail("unknown preset '" + std::string(name) + "'");
}

// -- overrides -----------------------------------------------------------------

std::optional<std::size_t> as_index(std::string_view segment) {
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(segment.data(), segment.data() + segment.size(), index);
    if (ec != std::errc{} || ptr != segment.data() + segment.size()) return std::nullopt;
    return index;
}

void apply_override(json& doc, const Override& assignment) {
    const auto& [path, raw] = assignment;
    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    json* node = &doc;
    std::string_view rest = path;
    while (true) {
        const auto dot = rest.find('.');
        const std::string_view segment = rest.substr(0, dot);
        if (segment.empty()) fail("malformed override key '" + path + "'");
        json* child = nullptr;
        if (node->is_array()) {
            const auto index = as_index(segment);
            if (!index || *index >= node->size()) fail("override key '" + path + "': no array element " + std::string(segment));
            child = &(*node)[*index];
        } else if (node->is_object() || node->is_null()) {
            child = &(*node)[std::string(segment)];
        } else {
            fail("override key '" + path + "' descends into a non-object value");
        }
        if (dot == std::string_view::npos) {
            *child = std::move(value);
            return;
        }
        node = child;
        rest = rest.substr(dot + 1);
    }
}

json resolve_document(const json& doc) {
    if (doc.is_string()) {
        const auto text = doc.get<std::string>();
        if (text.rfind(kPresetPrefix, 0) != 0) fail("expected an object or \"preset:<name>\"");
        return preset_json(std::string_view(text).substr(kPresetPrefix.size()));
    }
    return doc;
}

// Replaces named load/harvest presets by their expanded objects so overrides can reach into them.
void expand_named_sections(json& doc) {
    if (!doc.is_object()) fail("scenario document must be a JSON object");
    if (auto it = doc.find("load"); it != doc.end() && it->is_string()) *it = load_preset_json(it->get<std::string>());
    if (auto it = doc.find("harvest"); it != doc.end() && it->is_string()) {
        *it = harvest_preset_json(it->get<std::string>());
    }
}

json prepare(std::string_view text, std::span<const Override> overrides) {
    json doc = resolve_document(parse_json(text));
    expand_named_sections(doc);
    for (const auto& o : overrides) apply_override(doc, o);
    return doc;
}

// -- section parsers ---------------------------------------------------------------

CircuitParams parse_circuit(const json& j) {
    const std::string where = "circuit";
    check_keys(j, {"capacitance_F", "leakage_resistance_ohm", "w_pm", "E_pm_V", "V_on_V", "V_off_V",
                   "coldstart_energy_J", "coldstart_duration_s", "eh_reconnect_hysteresis_V"},
               where);
    CircuitParams c;
    c.capacitance = required_number(j, "capacitance_F", where);
    c.leakage_resistance = required_number(j, "leakage_resistance_ohm", where);
    c.w_pm = required_number(j, "w_pm", where);
    c.e_pm = required_number(j, "E_pm_V", where);
    c.v_on = required_number(j, "V_on_V", where);
    c.v_off = required_number(j, "V_off_V", where);
    c.coldstart_energy = optional_number(j, "coldstart_energy_J", 0.0, where);
    c.coldstart_duration = optional_number(j, "coldstart_duration_s", 0.0, where);
    c.eh_reconnect_hysteresis = optional_number(j, "eh_reconnect_hysteresis_V", 0.05, where);
    return c;
}

HarvestModel parse_harvest(const json& j) {
    const std::string where = "harvest";
    check_keys(j, {"E_eh_V", "above_range", "scale", "points"}, where);
    HarvestModel m;
    m.e_eh = required_number(j, "E_eh_V", where);
    m.scale = optional_number(j, "scale", 1.0, where);
    if (const auto it = j.find("above_range"); it != j.end()) {
        if (*it == "clamp") {
            m.above_range = AboveRange::Clamp;
        } else if (*it == "extrapolate") {
            m.above_range = AboveRange::Extrapolate;
        } else {
            fail("harvest.above_range must be \"clamp\" or \"extrapolate\"");
        }
    }
    const json& points = required(j, "points", where);
    if (!points.is_array()) fail("harvest.points must be an array");
    for (const auto& p : points) {
        check_keys(p, {"lux", "power_W"}, "harvest.points[]");
        m.points.push_back({required_number(p, "lux", "harvest.points[]"),
                            required_number(p, "power_W", "harvest.points[]")});
    }
    return m;
}

LoadProfile parse_load(const json& j) {
    const std::string where = "load";
    check_keys(j, {"operational_voltage_V", "sleep_current_A", "phases"}, where);
    LoadProfile profile;
    profile.operational_voltage = required_number(j, "operational_voltage_V", where);
    profile.sleep_current = required_number(j, "sleep_current_A", where);
    const json& phases = required(j, "phases", where);
    if (!phases.is_array()) fail("load.phases must be an array");
    for (const auto& p : phases) {
        check_keys(p, {"name", "current_A", "duration_s"}, "load.phases[]");
        const json& name = required(p, "name", "load.phases[]");
        if (!name.is_string()) fail("load.phases[].name must be a string");
        const auto state = parse_load_state(name.get<std::string>());
        if (!state) fail("unknown load phase '" + name.get<std::string>() + "'");
        profile.phases.push_back({*state, required_number(p, "current_A", "load.phases[]"),
                                  required_number(p, "duration_s", "load.phases[]"), profile.operational_voltage});
    }
    return profile;
}

IlluminationProfile parse_illumination(const json& j) {
    const std::string where = "illumination";
    check_keys(j, {"horizon_s", "segments"}, where);
    IlluminationProfile illum;
    illum.horizon = required_number(j, "horizon_s", where);
    const json& segments = required(j, "segments", where);
    if (!segments.is_array()) fail("illumination.segments must be an array");
    for (const auto& s : segments) {
        check_keys(s, {"start_s", "lux"}, "illumination.segments[]");
        illum.segments.push_back({required_number(s, "start_s", "illumination.segments[]"),
                                  required_number(s, "lux", "illumination.segments[]")});
    }
    return illum;
}

SimOptions parse_options(const json& j) {
    const std::string where = "options";
    check_keys(j, {"randomize_advertising", "seed", "leakage_in_connected_modes"}, where);
    SimOptions o;
    o.randomize_advertising = optional_bool(j, "randomize_advertising", false, where);
    o.leakage_in_connected_modes = optional_bool(j, "leakage_in_connected_modes", false, where);
    if (const auto it = j.find("seed"); it != j.end()) {
        const bool non_negative = it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0);
        if (!non_negative) fail("options.seed must be a non-negative integer");
        o.seed = it->get<std::uint64_t>();
    }
    return o;
}

const std::initializer_list<std::string_view> kTopLevelKeys = {
    "circuit", "harvest", "load", "illumination", "initial_voltage_V", "sleep_time_s",
    "record_interval_s", "options", "plan"};

// Sweep variants skip validation here so that one bad variant fails alone when run.
ScenarioConfig scenario_from_json(const json& doc, bool validate = true) {
    check_keys(doc, kTopLevelKeys, "scenario");
    ScenarioConfig cfg;
    cfg.circuit = parse_circuit(required(doc, "circuit", "scenario"));
    cfg.harvest = parse_harvest(required(doc, "harvest", "scenario"));
    cfg.load = parse_load(required(doc, "load", "scenario"));
    cfg.illumination = parse_illumination(required(doc, "illumination", "scenario"));
    cfg.initial_voltage = required_number(doc, "initial_voltage_V", "scenario");
    const json& sleep = required(doc, "sleep_time_s", "scenario");
    if (sleep.is_string()) {
        if (sleep != "auto") fail("sleep_time_s must be a number or \"auto\"");
    } else {
        cfg.sleep_time = number(sleep, "sleep_time_s");
    }
    cfg.record_interval = optional_number(doc, "record_interval_s", 0.1, "scenario");
    if (const auto it = doc.find("options"); it != doc.end()) cfg.options = parse_options(*it);
    if (const auto it = doc.find("plan"); it != doc.end()) check_keys(*it, {"p_harv_W", "lux"}, "plan");
    if (validate) cfg.validate();
    return cfg;
}

}  // namespace

Override parse_override(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override must look like key=value, got '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

std::string load_document_text(std::string_view config_ref) {
    if (config_ref.rfind(kPresetPrefix, 0) == 0) return preset_document(config_ref.substr(kPresetPrefix.size()));
    std::ifstream in{std::string(config_ref)};
    if (!in) throw ConfigError("cannot open config file '" + std::string(config_ref) + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ScenarioConfig parse_scenario(std::string_view json_text, std::span<const Override> overrides) {
    return scenario_from_json(prepare(json_text, overrides));
}

std::string scenario_to_json(const ScenarioConfig& config, int indent) {
    const auto& c = config.circuit;
    json phases = json::array();
    for (const auto& p : config.load.phases) {
        phases.push_back({{"name", to_string(p.name)}, {"current_A", p.current}, {"duration_s", p.duration}});
    }
    json segments = json::array();
    for (const auto& s : config.illumination.segments) segments.push_back({{"start_s", s.start}, {"lux", s.lux}});
    json doc = {
        {"circuit",
         {{"capacitance_F", c.capacitance},
          {"leakage_resistance_ohm", c.leakage_resistance},
          {"w_pm", c.w_pm},
          {"E_pm_V", c.e_pm},
          {"V_on_V", c.v_on},
          {"V_off_V", c.v_off},
          {"coldstart_energy_J", c.coldstart_energy},
          {"coldstart_duration_s", c.coldstart_duration},
          {"eh_reconnect_hysteresis_V", c.eh_reconnect_hysteresis}}},
        {"harvest", harvest_to_json(config.harvest)},
        {"load",
         {{"operational_voltage_V", config.load.operational_voltage},
          {"sleep_current_A", config.load.sleep_current},
          {"phases", std::move(phases)}}},
        {"illumination", {{"horizon_s", config.illumination.horizon}, {"segments", std::move(segments)}}},
        {"initial_voltage_V", config.initial_voltage},
        {"sleep_time_s", config.sleep_time ? json(*config.sleep_time) : json("auto")},
        {"record_interval_s", config.record_interval},
        {"options",
         {{"randomize_advertising", config.options.randomize_advertising},
          {"seed", config.options.seed},
          {"leakage_in_connected_modes", config.options.leakage_in_connected_modes}}},
    };
    return doc.dump(indent);
}

PlanRequest parse_plan_request(std::string_view json_text, std::span<const Override> overrides) {
    const json doc = prepare(json_text, overrides);
    check_keys(doc, kTopLevelKeys, "scenario");
    PlanRequest request;
    request.load = parse_load(required(doc, "load", "scenario"));
    request.load.validate();

    const json plan = doc.contains("plan") ? doc.at("plan") : json::object();
    check_keys(plan, {"p_harv_W", "lux"}, "plan");
    if (plan.contains("p_harv_W")) {
        request.p_harv = number(plan.at("p_harv_W"), "plan.p_harv_W");
        if (!(request.p_harv >= 0.0)) fail("plan.p_harv_W must be >= 0");
        return request;
    }
    if (!doc.contains("harvest")) fail("plan needs plan.p_harv_W or a harvest model");
    const HarvestModel harvest = parse_harvest(doc.at("harvest"));
    harvest.validate();
    double lux = 0.0;
    if (plan.contains("lux")) {
        lux = number(plan.at("lux"), "plan.lux");
    } else if (doc.contains("illumination")) {
        lux = parse_illumination(doc.at("illumination")).segments.at(0).lux;
    } else {
        fail("plan needs plan.lux, plan.p_harv_W or an illumination profile");
    }
    if (!(lux >= 0.0)) fail("plan.lux must be >= 0");
    request.lux = lux;
    request.p_harv = harvest.power_at(lux);
    return request;
}

std::vector<SweepVariant> parse_sweep(std::string_view json_text, std::span<const Override> overrides) {
    const json doc = parse_json(json_text);
    check_keys(doc, {"base", "variants"}, "sweep");
    json base = resolve_document(required(doc, "base", "sweep"));
    expand_named_sections(base);
    for (const auto& o : overrides) apply_override(base, o);

    const json& variants = required(doc, "variants", "sweep");
    if (!variants.is_array() || variants.empty()) fail("sweep.variants must be a non-empty array");
    std::vector<SweepVariant> out;
    for (const auto& v : variants) {
        check_keys(v, {"name", "set"}, "sweep.variants[]");
        const json& name = required(v, "name", "sweep.variants[]");
        if (!name.is_string()) fail("sweep.variants[].name must be a string");
        const auto& text = name.get_ref<const std::string&>();
        // Names become output file names.
        if (text.empty() || text == "." || text == ".." || text.find_first_of("/\\") != std::string::npos) {
            fail("sweep variant name '" + text + "' is not a valid file name");
        }
        for (const auto& seen : out) {
            if (seen.name == text) fail("duplicate sweep variant name '" + text + "'");
        }
        json variant_doc = base;
        if (const auto it = v.find("set"); it != v.end()) {
            if (!it->is_object()) fail("sweep.variants[].set must be an object");
            for (const auto& [key, value] : it->items()) {
                apply_override(variant_doc, {key, value.dump()});
            }
        }
        out.push_back({name.get<std::string>(), scenario_from_json(variant_doc, false)});
    }
    return out;
}

std::vector<PresetInfo> list_presets() {
    return {
        {"table1", "load",
         "Measured BLE sensing node profile at 3.3 V: SensorsReading 7.550 mA x 0.260 s, "
         "BleAdvertising 0.400 mA x 2.000 s, DataExchange 0.225 mA x 3.000 s, Sleep 0.070 mA."},
        {"table1-oracle", "harvest",
         "Harvested power at 300/500/700 lx recovered by inverting the energy balance at the "
         "reference sleep intervals 209.9 / 42.44 / 18.10 s; linear through the origin below 300 lx, "
         "extrapolated above 700 lx. E_eh = 4.5 V is a placeholder."},
        {"prototype-300lx", "scenario",
         "table1 load, table1-oracle harvest, constant 300 lx, fixed 209.9 s sleep, 800 s horizon. "
         "C = 0.4 F from the prototype; R_c, V_on, V_off, E_eh are placeholders to be set for real hardware."},
        {"prototype-500lx", "scenario", "As prototype-300lx at 500 lx with a fixed 42.44 s sleep."},
        {"prototype-700lx", "scenario", "As prototype-300lx at 700 lx with a fixed 18.10 s sleep."},
    };
}

std::string preset_document(std::string_view name) { return preset_json(name).dump(2); }

}  // namespace ehsim
