#pragma once

#include <cstddef>
#include <vector>

namespace ehsim {

struct HarvestPoint {
    double lux = 0.0;    ///< illuminance [lx]
    double power = 0.0;  ///< harvested power delivered by the EHU [W]
};

/// Behaviour of HarvestModel::power_at() above the last tabulated point.
enum class AboveRange {
    Clamp,        ///< hold the last point's power
    Extrapolate,  ///< continue the last segment's slope
};

/// Lux -> harvested power transduction, piecewise linear in lux.
/// Below the first point the curve is a straight line through the origin.
struct HarvestModel {
    std::vector<HarvestPoint> points;  ///< lux strictly ascending
    double e_eh = 0.0;                 ///< nominal harvester voltage E_eh [V]
    AboveRange above_range = AboveRange::Clamp;
    double scale = 1.0;                ///< multiplier on every tabulated power

    void validate() const;
    [[nodiscard]] double power_at(double lux) const;

    /// Three-point model at 300/500/700 lx whose powers balance the measured
    /// load profile exactly at the reference sleep intervals 209.9 / 42.44 / 18.10 s.
    /// Extrapolates above 700 lx. E_eh is a placeholder (4.5 V).
    [[nodiscard]] static HarvestModel table_one_oracle();
};

struct LuxSegment {
    double start = 0.0;  ///< [s]
    double lux = 0.0;
};

/// Piecewise-constant illuminance over [0, horizon].
struct IlluminationProfile {
    std::vector<LuxSegment> segments;
    double horizon = 0.0;  ///< [s]

    void validate() const;
    [[nodiscard]] static IlluminationProfile constant(double lux, double horizon) {
        return {{{0.0, lux}}, horizon};
    }
    /// Index of the segment active at time t.
    [[nodiscard]] std::size_t segment_at(double t) const noexcept;
    /// Start of the segment after `index`, or the horizon for the last one.
    [[nodiscard]] double segment_end(std::size_t index) const noexcept;
};

}  // namespace ehsim
