#include <doctest.h>

#include <string>
#include <vector>

#include "ehsim/errors.hpp"
#include "ehsim/scenario_io.hpp"

using namespace ehsim;

namespace {

std::string preset(const char* name) { return load_document_text(std::string("preset:") + name); }

}  // namespace

TEST_CASE("scenario presets parse") {
    for (const char* name : {"prototype-300lx", "prototype-500lx", "prototype-700lx"}) {
        const auto config = parse_scenario(preset(name));
        CHECK(config.circuit.capacitance == 0.4);
        CHECK(config.load.phases.size() == 3);
        CHECK(config.harvest.points.size() == 3);
        CHECK(config.illumination.horizon == 800.0);
        REQUIRE(config.sleep_time.has_value());
    }
    CHECK(*parse_scenario(preset("prototype-500lx")).sleep_time == 42.44);
    CHECK_THROWS_AS((void)preset_document("nope"), ConfigError);

    const auto listed = list_presets();
    CHECK(listed.size() == 5);
    for (const auto& p : listed) CHECK_NOTHROW((void)preset_document(p.name));
}

TEST_CASE("overrides reach nested keys and array elements") {
    const std::vector<Override> overrides{
        parse_override("circuit.w_pm=1.1"),
        parse_override("illumination.segments.0.lux=600"),
        parse_override("sleep_time_s=auto"),
        parse_override("options.randomize_advertising=true"),
        parse_override("load.phases.1.duration_s=3.5"),
    };
    const auto config = parse_scenario(preset("prototype-700lx"), overrides);
    CHECK(config.circuit.w_pm == 1.1);
    CHECK(config.illumination.segments[0].lux == 600.0);
    CHECK_FALSE(config.sleep_time.has_value());
    CHECK(config.options.randomize_advertising);
    CHECK(config.load.phases[1].duration == 3.5);
}

TEST_CASE("unknown keys are errors") {
    CHECK_THROWS_AS((void)parse_scenario(preset("prototype-700lx"), std::vector{parse_override("circuit.bogus=1")}),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_scenario(preset("prototype-700lx"), std::vector{parse_override("extra=1")}),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)parse_scenario(preset("prototype-700lx"), std::vector{parse_override("illumination.segments.5.lux=1")}),
        ConfigError);
    CHECK_THROWS_AS((void)parse_override("novalue"), ConfigError);
    CHECK_THROWS_AS((void)parse_override("=3"), ConfigError);
}

TEST_CASE("type and value errors") {
    const auto base = preset("prototype-700lx");
    CHECK_THROWS_AS((void)parse_scenario(base, std::vector{parse_override("circuit.w_pm=fast")}), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario(base, std::vector{parse_override("sleep_time_s=never")}), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario(base, std::vector{parse_override("options.seed=-1")}), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario(base, std::vector{parse_override("harvest.above_range=linear")}),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_scenario(base, std::vector{parse_override("load.phases.0.name=\"Nap\"")}),
                    ConfigError);
    CHECK_THROWS_AS((void)parse_scenario("{not json"), ConfigError);
    CHECK_THROWS_AS((void)parse_scenario("[1, 2]"), ConfigError);
    CHECK_THROWS_AS((void)load_document_text("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("named load and harvest sections expand") {
    const std::string doc = R"({
        "circuit": {"capacitance_F": 0.4, "leakage_resistance_ohm": 1e6, "w_pm": 1, "E_pm_V": 3.3,
                    "V_on_V": 3.1, "V_off_V": 2.8},
        "harvest": "table1-oracle",
        "load": "table1",
        "illumination": {"horizon_s": 100, "segments": [{"start_s": 0, "lux": 450}]},
        "initial_voltage_V": 3.2,
        "sleep_time_s": 20
    })";
    const auto config = parse_scenario(doc, std::vector{parse_override("harvest.scale=1.05")});
    CHECK(config.harvest.scale == 1.05);
    CHECK(config.load.sleep_current == doctest::Approx(0.07e-3));
    CHECK(config.record_interval == 0.1);
    CHECK(config.circuit.eh_reconnect_hysteresis == 0.05);
}

TEST_CASE("serialised scenarios parse back identically") {
    auto config = parse_scenario(preset("prototype-300lx"),
                                 std::vector{parse_override("circuit.coldstart_energy_J=0.002"),
                                             parse_override("circuit.coldstart_duration_s=0.5"),
                                             parse_override("options.seed=123456789012")});
    const auto again = parse_scenario(scenario_to_json(config));
    CHECK(scenario_to_json(again) == scenario_to_json(config));
    CHECK(again.options.seed == 123456789012ULL);
    CHECK(again.circuit.coldstart_energy == 0.002);
}

TEST_CASE("plan requests") {
    const auto at_700 = parse_plan_request(preset("prototype-700lx"));
    REQUIRE(at_700.lux.has_value());
    CHECK(*at_700.lux == 700.0);
    CHECK(at_700.p_harv == doctest::Approx(6.64661815e-4).epsilon(1e-8));

    const auto at_lux = parse_plan_request(preset("prototype-700lx"), std::vector{parse_override("plan.lux=500")});
    CHECK(at_lux.p_harv == doctest::Approx(4.43376101e-4).epsilon(1e-8));

    const auto explicit_power =
        parse_plan_request(preset("prototype-700lx"), std::vector{parse_override("plan.p_harv_W=6.592e-4")});
    CHECK_FALSE(explicit_power.lux.has_value());
    CHECK(explicit_power.p_harv == 6.592e-4);

    const auto load_only = R"({"load": "table1", "plan": {"p_harv_W": 1e-3}})";
    CHECK(parse_plan_request(load_only).p_harv == 1e-3);
    CHECK_THROWS_AS((void)parse_plan_request(R"({"load": "table1"})"), ConfigError);
    CHECK_THROWS_AS((void)parse_plan_request(R"({"load": "table1", "plan": {"p_harv_W": -1}})"), ConfigError);
}

TEST_CASE("sweep documents") {
    const std::string doc = R"({
        "base": "preset:prototype-700lx",
        "variants": [
            {"name": "minus100", "set": {"illumination.segments.0.lux": 600}},
            {"name": "nominal"},
            {"name": "plus100", "set": {"illumination.segments.0.lux": 800, "sleep_time_s": "auto"}}
        ]
    })";
    const auto variants = parse_sweep(doc, std::vector{parse_override("illumination.horizon_s=100")});
    REQUIRE(variants.size() == 3);
    CHECK(variants[0].name == "minus100");
    CHECK(variants[0].config.illumination.segments[0].lux == 600.0);
    CHECK(variants[1].config.illumination.segments[0].lux == 700.0);
    CHECK_FALSE(variants[2].config.sleep_time.has_value());
    for (const auto& v : variants) CHECK(v.config.illumination.horizon == 100.0);

    CHECK_THROWS_AS((void)parse_sweep(R"({"base": "preset:prototype-700lx", "variants": []})"), ConfigError);
    CHECK_THROWS_AS((void)parse_sweep(R"({"base": "preset:prototype-700lx", "variants": [{"name": "../x"}]})"),
                    ConfigError);
    CHECK_THROWS_AS(
        (void)parse_sweep(R"({"base": "preset:prototype-700lx", "variants": [{"name": "a"}, {"name": "a"}]})"),
        ConfigError);
    CHECK_THROWS_AS((void)parse_sweep(R"({"base": "preset:prototype-700lx", "variants": [{"name": "a", "x": 1}]})"),
                    ConfigError);
}
