#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace edgegen {

enum class FailureMode { kNone, kNonDetection, kIntermittent, kDelayed };

std::string_view to_string(FailureMode m);
/// Inverse of to_string; throws ParseError.
FailureMode failure_mode_from_string(std::string_view s);

struct FailureConfig {
  std::int64_t window_ticks = 50;  // look-back before first contact
  std::int64_t dropout_ticks = 10; // undetected run that counts as losing track
  double decel = 8.0;              // m/s^2 for the stopping-distance test

  void validate() const;
};

/// What the classifier needs from one tick of telemetry.
struct TickObservation {
  bool detected = false;
  double gap = 0.0;
  double ego_speed = 0.0;
  bool collided = false;
};

/**
 * Labels a collision episode by how perception failed before first contact:
 *  - non_detection: the lead was never detected before contact;
 *  - intermittent: inside the look-back window, a run of >= dropout_ticks
 *    undetected ticks follows an earlier detection;
 *  - delayed: the first detection happened inside the stopping distance
 *    v^2 / (2 decel);
 *  - otherwise intermittent.
 * Episodes without contact are kNone.
 */
FailureMode classify_failure(std::span<const TickObservation> history, const FailureConfig& cfg = {});

}  // namespace edgegen
