#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgegen/knobs.hpp"

namespace edgegen {

/// Physical constants of the longitudinal corridor.
struct SimConfig {
  double dt = 0.1;              // s per tick
  double accel_max = 3.0;       // m/s^2 at full throttle
  double decel_max = 8.0;       // m/s^2 at full brake
  double speed_cap = 30.0;      // m/s
  double vehicle_length = 4.5;  // m
  double lead_accel_max = 4.0;  // m/s^2, both directions

  void validate() const;
};

/// Lead vehicle tracks `target_speed` during [start_tick, start_tick + duration_ticks).
struct LeadEvent {
  std::int64_t start_tick = 0;
  std::int64_t duration_ticks = 0;
  double target_speed = 0.0;

  std::int64_t end_tick() const { return start_tick + duration_ticks; }
  bool operator==(const LeadEvent&) const = default;
};

/// At trigger_tick a new vehicle appears inserted_gap ahead of the ego and becomes the lead.
struct CutIn {
  std::int64_t trigger_tick = 0;
  double inserted_gap = 0.0;
  double inserted_speed = 0.0;

  bool operator==(const CutIn&) const = default;
};

struct Scene {
  std::string scene_id;
  double initial_gap = 0.0;
  double ego_speed0 = 0.0;
  double lead_speed0 = 0.0;
  std::vector<LeadEvent> lead_events;
  std::optional<CutIn> cut_in;
  std::uint64_t noise_seed = 0;

  bool operator==(const Scene&) const = default;
};

/// Throws InvalidArgument if events are unsorted/overlapping or the gap is too small.
void validate_scene(const Scene& scene, const SimConfig& cfg);

struct WorldState {
  std::int64_t tick = 0;
  double ego_pos = 0.0;
  double ego_speed = 0.0;
  double lead_pos = 0.0;
  double lead_speed = 0.0;
  KnobState knobs;
  bool collided = false;

  bool operator==(const WorldState&) const = default;
};

/// Longitudinal controls; at most one of throttle/brake is non-zero.
class ControlSignal {
 public:
  static ControlSignal coast() { return {0.0, 0.0}; }
  static ControlSignal throttle(double fraction);
  static ControlSignal brake(double fraction);

  double throttle() const { return throttle_; }
  double brake() const { return brake_; }

 private:
  ControlSignal(double t, double b) : throttle_(t), brake_(b) {}
  double throttle_;
  double brake_;
};

/// Bumper-to-bumper distance: lead_pos - ego_pos - vehicle_length.
double gap_of(const WorldState& world, double vehicle_length = 4.5);

/// World at tick 0: ego at the origin, lead initial_gap ahead.
WorldState initial_world(const Scene& scene, const SimConfig& cfg, const KnobState& knobs = KnobState::clear());

/// Lead speed set-point in force at `tick`.
double lead_target_speed(const Scene& scene, std::int64_t tick);

/**
 * Advances one tick with semi-implicit Euler.
 *
 * After first contact the kinematics are frozen: speeds drop to zero and only
 * the tick advances. On the contact tick the lead is pushed forward to exact
 * contact (gap = 0) and the impact speeds are kept.
 */
WorldState step(const WorldState& world, const ControlSignal& control, const Scene& scene, const SimConfig& cfg);

}  // namespace edgegen
