#include "edgegen/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgegen/errors.hpp"

namespace edgegen {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kEgoHeadingDeg = 0.0;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }
}  // namespace

void PerceptionConfig::validate() const {
  if (!(r_max > 0.0)) throw InvalidConfig("perception.r_max must be > 0");
  if (!(fog_coeff >= 0.0 && rain_coeff >= 0.0 && deposit_coeff >= 0.0 && glare_factor >= 0.0 &&
        glare_alt_max >= 0.0 && glare_az_halfwidth >= 0.0 && range_noise_coeff >= 0.0)) {
    throw InvalidConfig("perception coefficients must be >= 0");
  }
  if (!(night_floor > 0.0 && night_floor <= 1.0)) throw InvalidConfig("perception.night_floor must be in (0, 1]");
}

void ControllerConfig::validate() const {
  if (!(v_cruise >= 0.0)) throw InvalidConfig("controller.v_cruise must be >= 0");
  if (!(k_v >= 0.0)) throw InvalidConfig("controller.k_v must be >= 0");
  if (!(d_standoff >= 0.0)) throw InvalidConfig("controller.d_standoff must be >= 0");
  if (!(a_comfort > 0.0)) throw InvalidConfig("controller.a_comfort must be > 0");
  if (!(epsilon > 0.0)) throw InvalidConfig("controller.epsilon must be > 0");
}

double visibility(const KnobState& knobs, const PerceptionConfig& cfg) {
  const double sun = std::max(0.0, std::sin(knobs.sun_altitude * kDegToRad));
  const double light = cfg.night_floor + (1.0 - cfg.night_floor) * sun;
  const double extinction = std::exp(-cfg.fog_coeff * knobs.fog_density) *
                            std::exp(-cfg.rain_coeff * knobs.precipitation) *
                            std::exp(-cfg.deposit_coeff * knobs.precipitation_deposits);
  const bool low_sun = knobs.sun_altitude > 0.0 && knobs.sun_altitude < cfg.glare_alt_max;
  const bool facing_sun = std::abs(wrap_180(knobs.sun_azimuth - kEgoHeadingDeg)) < cfg.glare_az_halfwidth;
  const double glare = (low_sun && facing_sun) ? cfg.glare_factor : 1.0;
  return clamp01(light * extinction * glare);
}

double detection_probability(double gap, double range) {
  if (!(range > 0.0) || gap > range) return 0.0;
  return clamp01(1.2 * (range - gap) / range);
}

DetectionResult sense(double gap, double vis, const PerceptionConfig& cfg, RngStream& rng) {
  const double u = rng.uniform01();
  const double n = rng.normal();
  const double d = std::max(gap, 0.0);
  const double range = cfg.r_max * vis;
  const double p = detection_probability(d, range);
  if (!(u < p)) return DetectionResult::none();

  DetectionResult det;
  det.detected = true;
  det.iou = std::clamp(vis * (1.0 - d / range), 0.0, 1.0);
  det.est_distance = d * (1.0 + n * cfg.range_noise_coeff * (1.0 - vis));
  return det;
}

DetectionResult sense(const WorldState& world, const PerceptionConfig& cfg, const SimConfig& sim,
                      std::uint64_t noise_seed) {
  RngStream rng = RngStream(noise_seed).split(static_cast<std::uint64_t>(world.tick));
  return sense(gap_of(world, sim.vehicle_length), visibility(world.knobs, cfg), cfg, rng);
}

ControlSignal behavior_control(const DetectionResult& det, double ego_speed, const ControllerConfig& cfg,
                               const SimConfig& sim) {
  const double cruise = clamp01(cfg.k_v * (cfg.v_cruise - ego_speed));
  if (!det.detected || !det.est_distance) return ControlSignal::throttle(cruise);

  const double est = *det.est_distance;
  const double a_req = ego_speed * ego_speed / (2.0 * std::max(est - cfg.d_standoff, cfg.epsilon));
  if (a_req >= cfg.a_comfort) return ControlSignal::brake(a_req / sim.decel_max);

  // Largest speed next tick that keeps the stopping demand under a_comfort.
  const double room = std::max(est - ego_speed * sim.dt - cfg.d_standoff, 0.0);
  const double v_allowed = std::sqrt(2.0 * cfg.a_comfort * room);
  const double cap = sim.accel_max > 0.0 ? clamp01((v_allowed - ego_speed) / (sim.dt * sim.accel_max)) : 0.0;
  return ControlSignal::throttle(std::min(cruise, cap));
}

}  // namespace edgegen
