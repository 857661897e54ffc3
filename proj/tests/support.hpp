#pragma once

// Shared fixtures for the unit and acceptance tests.

#include <cmath>
#include <optional>

#include "ehsim/engine.hpp"
#include "ehsim/harvest.hpp"
#include "ehsim/load_profile.hpp"

namespace ehsim::testing {

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

/// Prototype circuit with explicit thresholds: C = 0.4 F, R_c = 1e6 ohm,
/// V_on = 3.1 V, V_off = 2.8 V.
inline CircuitParams prototype_circuit() {
    CircuitParams p;
    p.capacitance = 0.4;
    p.leakage_resistance = 1.0e6;
    p.w_pm = 1.0;
    p.e_pm = 3.3;
    p.v_on = 3.1;
    p.v_off = 2.8;
    return p;
}

/// Measured load profile, oracle harvest model, constant lux.
inline ScenarioConfig prototype_scenario(double lux, std::optional<double> sleep_time, double horizon,
                                         double initial_voltage = 3.3) {
    ScenarioConfig c;
    c.circuit = prototype_circuit();
    c.harvest = HarvestModel::table_one_oracle();
    c.load = LoadProfile::table_one();
    c.illumination = IlluminationProfile::constant(lux, horizon);
    c.initial_voltage = initial_voltage;
    c.sleep_time = sleep_time;
    c.record_interval = 0.1;
    return c;
}

}  // namespace ehsim::testing
