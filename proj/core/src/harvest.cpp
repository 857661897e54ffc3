#include "ehsim/harvest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehsim/errors.hpp"
#include "ehsim/load_profile.hpp"
#include "ehsim/planner.hpp"

namespace ehsim {

void HarvestModel::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("harvest model: " + msg); };
    if (points.empty()) fail("at least one point is required");
    if (!(e_eh > 0.0) || !std::isfinite(e_eh)) fail("E_eh must be > 0");
    if (!(scale >= 0.0) || !std::isfinite(scale)) fail("scale must be >= 0");
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!(p.lux >= 0.0) || !std::isfinite(p.lux)) fail("lux must be >= 0");
        if (!(p.power >= 0.0) || !std::isfinite(p.power)) fail("power must be >= 0");
        if (p.lux == 0.0 && p.power != 0.0) fail("power must be 0 at 0 lx");
        if (i > 0) {
            if (!(p.lux > points[i - 1].lux)) fail("lux values must be strictly ascending");
            if (p.power < points[i - 1].power) fail("power must be non-decreasing in lux");
        }
    }
}

double HarvestModel::power_at(double lux) const {
    if (!(lux > 0.0) || points.empty()) return 0.0;
    const auto& first = points.front();
    if (lux <= first.lux) return scale * first.power * lux / first.lux;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& a = points[i - 1];
        const auto& b = points[i];
        if (lux <= b.lux) return scale * (a.power + (b.power - a.power) * (lux - a.lux) / (b.lux - a.lux));
    }
    const auto& last = points.back();
    if (above_range == AboveRange::Clamp) return scale * last.power;
    double slope = last.power / last.lux;
    if (points.size() > 1) {
        const auto& prev = points[points.size() - 2];
        slope = (last.power - prev.power) / (last.lux - prev.lux);
    }
    return scale * (last.power + slope * (lux - last.lux));
}

HarvestModel HarvestModel::table_one_oracle() {
    const auto profile = LoadProfile::table_one();
    return HarvestModel{
        .points = {{300.0, harvest_power_oracle(profile, 209.9)},
                   {500.0, harvest_power_oracle(profile, 42.44)},
                   {700.0, harvest_power_oracle(profile, 18.10)}},
        .e_eh = 4.5,
        .above_range = AboveRange::Extrapolate,
        .scale = 1.0,
    };
}

void IlluminationProfile::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("illumination: " + msg); };
    if (segments.empty()) fail("at least one segment is required");
    if (segments.front().start != 0.0) fail("first segment must start at 0 s");
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) fail("horizon must be >= 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!(segments[i].lux >= 0.0) || !std::isfinite(segments[i].lux)) fail("lux must be >= 0");
        if (i > 0 && !(segments[i].start > segments[i - 1].start)) {
            fail("segment start times must be strictly increasing");
        }
    }
}

std::size_t IlluminationProfile::segment_at(double t) const noexcept {
    std::size_t index = 0;
    for (std::size_t i = 1; i < segments.size(); ++i) {
        if (segments[i].start <= t) index = i;
    }
    return index;
}

double IlluminationProfile::segment_end(std::size_t index) const noexcept {
    if (index + 1 < segments.size()) return std::min(segments[index + 1].start, horizon);
    return horizon;
}

}  // namespace ehsim
