#include "edgegen/failure.hpp"

#include <algorithm>
#include <string>

#include "edgegen/errors.hpp"

namespace edgegen {

std::string_view to_string(FailureMode m) {
  switch (m) {
    case FailureMode::kNone:
      return "none";
    case FailureMode::kNonDetection:
      return "non_detection";
    case FailureMode::kIntermittent:
      return "intermittent";
    case FailureMode::kDelayed:
      return "delayed";
  }
  return "none";
}

FailureMode failure_mode_from_string(std::string_view s) {
  for (FailureMode m : {FailureMode::kNone, FailureMode::kNonDetection, FailureMode::kIntermittent,
                        FailureMode::kDelayed}) {
    if (to_string(m) == s) return m;
  }
  throw ParseError("unknown failure mode '" + std::string(s) + "'");
}

void FailureConfig::validate() const {
  if (window_ticks <= 0) throw InvalidConfig("failure window must be > 0 ticks");
  if (dropout_ticks <= 0) throw InvalidConfig("failure dropout run must be > 0 ticks");
  if (!(decel > 0.0)) throw InvalidConfig("failure stopping deceleration must be > 0");
}

FailureMode classify_failure(std::span<const TickObservation> history, const FailureConfig& cfg) {
  const auto contact_it = std::find_if(history.begin(), history.end(), [](const TickObservation& o) { return o.collided; });
  if (contact_it == history.end()) return FailureMode::kNone;
  const auto contact = static_cast<std::int64_t>(contact_it - history.begin());

  std::int64_t first_detection = -1;
  for (std::int64_t t = 0; t < contact; ++t) {
    if (history[static_cast<std::size_t>(t)].detected) {
      first_detection = t;
      break;
    }
  }
  if (first_detection < 0) return FailureMode::kNonDetection;

  const std::int64_t window_start = std::max<std::int64_t>(0, contact - cfg.window_ticks);
  bool seen_detection = false;
  std::int64_t run = 0;
  for (std::int64_t t = 0; t < contact; ++t) {
    const bool det = history[static_cast<std::size_t>(t)].detected;
    if (det) {
      seen_detection = true;
      run = 0;
      continue;
    }
    if (t < window_start || !seen_detection) continue;
    if (++run >= cfg.dropout_ticks) return FailureMode::kIntermittent;
  }

  const TickObservation& first = history[static_cast<std::size_t>(first_detection)];
  const double stopping = first.ego_speed * first.ego_speed / (2.0 * cfg.decel);
  if (first.gap < stopping) return FailureMode::kDelayed;
  return FailureMode::kIntermittent;
}

}  // namespace edgegen
