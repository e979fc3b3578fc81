#include "edgegen/knobs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "edgegen/errors.hpp"

namespace edgegen {

namespace {
constexpr std::array<std::string_view, kKnobCount> kNames{
    "fog_density", "precipitation", "precipitation_deposits", "sun_altitude", "sun_azimuth"};
}  // namespace

std::string_view knob_name(Knob k) { return kNames[static_cast<std::size_t>(k)]; }

Knob knob_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKnobCount; ++i) {
    if (kNames[i] == name) return static_cast<Knob>(i);
  }
  throw InvalidArgument("unknown knob '" + std::string(name) + "'");
}

double wrap_360(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (r >= 360.0) r = 0.0;
  return r;
}

double wrap_180(double deg) {
  double r = wrap_360(deg);
  return r > 180.0 ? r - 360.0 : r;
}

KnobState KnobState::from_array(const KnobVector& v) {
  KnobState k;
  k.fog_density = std::clamp(v[0], kKnobRanges[0].min, kKnobRanges[0].max);
  k.precipitation = std::clamp(v[1], kKnobRanges[1].min, kKnobRanges[1].max);
  k.precipitation_deposits = std::clamp(v[2], kKnobRanges[2].min, kKnobRanges[2].max);
  k.sun_altitude = std::clamp(v[3], kKnobRanges[3].min, kKnobRanges[3].max);
  k.sun_azimuth = wrap_360(v[4]);
  return k;
}

bool in_range(const KnobState& k) {
  const KnobVector v = k.to_array();
  for (std::size_t i = 0; i + 1 < kKnobCount; ++i) {
    if (!(v[i] >= kKnobRanges[i].min && v[i] <= kKnobRanges[i].max)) return false;
  }
  return v[4] >= 0.0 && v[4] < 360.0;
}

KnobState apply_action(const KnobState& knobs, const KnobVector& raw, const KnobMask& frozen) {
  KnobVector next = knobs.to_array();
  for (std::size_t i = 0; i < kKnobCount; ++i) {
    if (frozen[i]) continue;
    const double step = std::clamp(raw[i], -1.0, 1.0) * kMaxStepFraction * kKnobRanges[i].span();
    next[i] += step;
  }
  return KnobState::from_array(next);
}

}  // namespace edgegen
