#pragma once

// Scenario documents are single JSON objects; docs/config-schema.md describes
// every key. Unknown keys are rejected. A config reference is either a file
// path or "preset:<name>" for a built-in document.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ehsim/engine.hpp"
#include "ehsim/load_profile.hpp"

namespace ehsim {

/// A dotted-path assignment such as {"circuit.w_pm", "1.1"}. Values are read as
/// JSON when they parse, as plain strings otherwise. Integer path elements
/// index arrays ("illumination.segments.0.lux").
using Override = std::pair<std::string, std::string>;

/// Splits "key=value"; throws ConfigError when '=' or the key is missing.
[[nodiscard]] Override parse_override(std::string_view text);

/// Reads a config file, or returns the built-in document for "preset:<name>".
[[nodiscard]] std::string load_document_text(std::string_view config_ref);

[[nodiscard]] ScenarioConfig parse_scenario(std::string_view json_text,
                                            std::span<const Override> overrides = {});

/// Fully expanded JSON form of a scenario, accepted back by parse_scenario().
[[nodiscard]] std::string scenario_to_json(const ScenarioConfig& config, int indent = 2);

struct PlanRequest {
    LoadProfile load;
    double p_harv = 0.0;
    std::optional<double> lux;  ///< set when p_harv came from the harvest model
};

/// Needs "load" plus either "plan": {"p_harv_W": x}, or a harvest model with
/// "plan": {"lux": x} or, failing that, the lux of the first illumination segment.
[[nodiscard]] PlanRequest parse_plan_request(std::string_view json_text,
                                             std::span<const Override> overrides = {});

struct SweepVariant {
    std::string name;
    ScenarioConfig config;
};

/// {"base": <scenario object or "preset:<name>">,
///  "variants": [{"name": "...", "set": {"dotted.key": value, ...}}, ...]}
/// Overrides apply to the base before each variant's own assignments. Variant
/// values are not range-checked here; run() rejects an invalid variant on its own.
[[nodiscard]] std::vector<SweepVariant> parse_sweep(std::string_view json_text,
                                                    std::span<const Override> overrides = {});

struct PresetInfo {
    std::string name;
    std::string kind;  ///< "scenario", "load" or "harvest"
    std::string description;
};

[[nodiscard]] std::vector<PresetInfo> list_presets();

/// JSON text of a built-in preset; throws ConfigError for unknown names.
[[nodiscard]] std::string preset_document(std::string_view name);

}  // namespace ehsim
