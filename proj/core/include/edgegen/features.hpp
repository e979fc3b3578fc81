#pragma once

#include <array>
#include <cstddef>

#include "edgegen/perception.hpp"
#include "edgegen/world.hpp"

namespace edgegen {

inline constexpr std::size_t kFeatureCount = 12;

/**
 * Observation fed to the agent:
 *   0 fog, 1 precipitation, 2 deposits, 3 sun_altitude / 90,
 *   4 sin(azimuth), 5 cos(azimuth), 6 visibility, 7 gap / 100 in [0, 2],
 *   8 ego_speed / v_cap, 9 lead_speed / v_cap, 10 detected {0,1}, 11 iou.
 */
using FeatureState = std::array<double, kFeatureCount>;

FeatureState featurize(const WorldState& world, const DetectionResult& det, double visibility, const SimConfig& sim);

}  // namespace edgegen
