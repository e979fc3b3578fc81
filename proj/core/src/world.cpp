#include "edgegen/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgegen/errors.hpp"

namespace edgegen {

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidConfig("sim.dt must be > 0");
  if (!(accel_max >= 0.0)) throw InvalidConfig("sim.accel_max must be >= 0");
  if (!(decel_max > 0.0)) throw InvalidConfig("sim.decel_max must be > 0");
  if (!(speed_cap > 0.0)) throw InvalidConfig("sim.speed_cap must be > 0");
  if (!(vehicle_length > 0.0)) throw InvalidConfig("sim.vehicle_length must be > 0");
  if (!(lead_accel_max > 0.0)) throw InvalidConfig("sim.lead_accel_max must be > 0");
}

void validate_scene(const Scene& scene, const SimConfig& cfg) {
  const std::string where = "scene '" + scene.scene_id + "': ";
  if (scene.scene_id.empty()) throw InvalidArgument("scene_id must not be empty");
  if (!(scene.initial_gap > cfg.vehicle_length)) {
    throw InvalidArgument(where + "initial_gap must exceed the vehicle length");
  }
  if (!(scene.ego_speed0 >= 0.0) || !(scene.lead_speed0 >= 0.0)) {
    throw InvalidArgument(where + "initial speeds must be >= 0");
  }
  std::int64_t prev_end = std::numeric_limits<std::int64_t>::min();
  for (const LeadEvent& e : scene.lead_events) {
    if (e.start_tick < 0 || e.duration_ticks <= 0 || !(e.target_speed >= 0.0)) {
      throw InvalidArgument(where + "malformed lead event");
    }
    if (e.start_tick < prev_end) {
      throw InvalidArgument(where + "lead events must be sorted and non-overlapping");
    }
    prev_end = e.end_tick();
  }
  if (scene.cut_in) {
    const CutIn& c = *scene.cut_in;
    if (c.trigger_tick < 1 || !(c.inserted_gap > 0.0) || !(c.inserted_speed >= 0.0)) {
      throw InvalidArgument(where + "malformed cut-in");
    }
  }
}

ControlSignal ControlSignal::throttle(double fraction) { return {std::clamp(fraction, 0.0, 1.0), 0.0}; }

ControlSignal ControlSignal::brake(double fraction) { return {0.0, std::clamp(fraction, 0.0, 1.0)}; }

double gap_of(const WorldState& world, double vehicle_length) {
  return world.lead_pos - world.ego_pos - vehicle_length;
}

WorldState initial_world(const Scene& scene, const SimConfig& cfg, const KnobState& knobs) {
  WorldState w;
  w.tick = 0;
  w.ego_pos = 0.0;
  w.ego_speed = std::min(scene.ego_speed0, cfg.speed_cap);
  w.lead_pos = scene.initial_gap + cfg.vehicle_length;
  w.lead_speed = scene.lead_speed0;
  w.knobs = knobs;
  w.collided = false;
  return w;
}

double lead_target_speed(const Scene& scene, std::int64_t tick) {
  for (const LeadEvent& e : scene.lead_events) {
    if (tick >= e.start_tick && tick < e.end_tick()) return e.target_speed;
  }
  if (scene.cut_in && tick >= scene.cut_in->trigger_tick) return scene.cut_in->inserted_speed;
  return scene.lead_speed0;
}

WorldState step(const WorldState& world, const ControlSignal& control, const Scene& scene, const SimConfig& cfg) {
  WorldState next = world;
  next.tick = world.tick + 1;

  if (world.collided) {
    next.ego_speed = 0.0;
    next.lead_speed = 0.0;
    return next;
  }

  const double accel = control.throttle() * cfg.accel_max - control.brake() * cfg.decel_max;
  next.ego_speed = std::clamp(world.ego_speed + accel * cfg.dt, 0.0, cfg.speed_cap);
  next.ego_pos = world.ego_pos + next.ego_speed * cfg.dt;

  if (scene.cut_in && next.tick == scene.cut_in->trigger_tick) {
    next.lead_pos = next.ego_pos + cfg.vehicle_length + scene.cut_in->inserted_gap;
    next.lead_speed = scene.cut_in->inserted_speed;
  } else {
    const double target = lead_target_speed(scene, world.tick);
    const double max_dv = cfg.lead_accel_max * cfg.dt;
    const double dv = std::clamp(target - world.lead_speed, -max_dv, max_dv);
    next.lead_speed = std::max(0.0, world.lead_speed + dv);
    next.lead_pos = world.lead_pos + next.lead_speed * cfg.dt;
  }

  if (gap_of(next, cfg.vehicle_length) <= 0.0) {
    next.collided = true;
    next.lead_pos = std::max(next.lead_pos, next.ego_pos + cfg.vehicle_length);
  }
  return next;
}

}  // namespace edgegen
