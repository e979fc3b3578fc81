#pragma once

#include <optional>

#include "edgegen/knobs.hpp"
#include "edgegen/rng.hpp"
#include "edgegen/world.hpp"

namespace edgegen {

/// Surrogate camera + detector parameters.
struct PerceptionConfig {
  double r_max = 120.0;             // m, detection range in perfect visibility
  double fog_coeff = 3.0;           // extinction per unit fog density
  double rain_coeff = 1.5;          // extinction per unit precipitation
  double deposit_coeff = 0.8;       // extinction per unit wet-road deposits
  double night_floor = 0.15;        // light level with the sun below the horizon
  double glare_factor = 0.5;        // visibility multiplier inside the glare window
  double glare_alt_max = 25.0;      // deg
  double glare_az_halfwidth = 30.0; // deg
  double range_noise_coeff = 0.05;  // relative range noise at zero visibility

  void validate() const;
};

/// The ego vehicle's behavior controller.
struct ControllerConfig {
  double v_cruise = 15.0;   // m/s
  double k_v = 0.3;         // throttle per m/s of speed error
  double d_standoff = 5.0;  // m
  double a_comfort = 2.5;   // m/s^2
  double epsilon = 0.1;     // m

  void validate() const;
};

struct DetectionResult {
  bool detected = false;
  std::optional<double> est_distance;  // present iff detected
  double iou = 0.0;                    // 0 when not detected

  static DetectionResult none() { return {}; }
  bool operator==(const DetectionResult&) const = default;
};

/// Visibility in [0, 1]: light level x fog/rain/deposit extinction x sun glare.
double visibility(const KnobState& knobs, const PerceptionConfig& cfg);

/// Per-tick detection probability at `gap` for detection range `range`.
double detection_probability(double gap, double range);

/**
 * One detector frame. Consumes exactly two draws from `rng` whatever the
 * outcome, so downstream draws do not depend on the branch taken.
 */
DetectionResult sense(double gap, double visibility, const PerceptionConfig& cfg, RngStream& rng);

/// Frame for `world`, with the noise stream keyed by (noise_seed, tick).
DetectionResult sense(const WorldState& world, const PerceptionConfig& cfg, const SimConfig& sim,
                      std::uint64_t noise_seed);

/// Converts a detection into throttle/brake for the ego vehicle.
ControlSignal behavior_control(const DetectionResult& det, double ego_speed, const ControllerConfig& cfg,
                               const SimConfig& sim);

}  // namespace edgegen
