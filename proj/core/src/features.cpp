#include "edgegen/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace edgegen {

FeatureState featurize(const WorldState& world, const DetectionResult& det, double vis, const SimConfig& sim) {
  const double az = world.knobs.sun_azimuth * std::numbers::pi / 180.0;
  return {
      world.knobs.fog_density,
      world.knobs.precipitation,
      world.knobs.precipitation_deposits,
      world.knobs.sun_altitude / 90.0,
      std::sin(az),
      std::cos(az),
      vis,
      std::clamp(gap_of(world, sim.vehicle_length) / 100.0, 0.0, 2.0),
      world.ego_speed / sim.speed_cap,
      world.lead_speed / sim.speed_cap,
      det.detected ? 1.0 : 0.0,
      det.iou,
  };
}

}  // namespace edgegen
