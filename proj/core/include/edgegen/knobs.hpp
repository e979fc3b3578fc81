#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace edgegen {

/// The five weather knobs, in action-vector order.
enum class Knob : std::size_t {
  kFog = 0,
  kPrecipitation = 1,
  kDeposits = 2,
  kSunAltitude = 3,
  kSunAzimuth = 4,
};

inline constexpr std::size_t kKnobCount = 5;

/// Largest per-step change of any knob, as a fraction of its span.
inline constexpr double kMaxStepFraction = 0.05;

struct KnobRange {
  double min;
  double max;
  constexpr double span() const { return max - min; }
};

inline constexpr std::array<KnobRange, kKnobCount> kKnobRanges{{
    {0.0, 1.0},     // fog density
    {0.0, 1.0},     // precipitation
    {0.0, 1.0},     // precipitation deposits
    {-90.0, 90.0},  // sun altitude, degrees
    {0.0, 360.0},   // sun azimuth, degrees, half-open and wrapped
}};

std::string_view knob_name(Knob k);
/// Inverse of knob_name; throws InvalidArgument for unknown names.
Knob knob_from_name(std::string_view name);

using KnobVector = std::array<double, kKnobCount>;
using KnobMask = std::array<bool, kKnobCount>;

struct KnobState {
  double fog_density = 0.0;
  double precipitation = 0.0;
  double precipitation_deposits = 0.0;
  double sun_altitude = 90.0;
  double sun_azimuth = 0.0;

  /// No fog or rain, dry road, sun at zenith.
  static constexpr KnobState clear() { return {}; }

  KnobVector to_array() const {
    return {fog_density, precipitation, precipitation_deposits, sun_altitude, sun_azimuth};
  }
  /// Builds a state from raw values, clamping densities/altitude and wrapping azimuth.
  static KnobState from_array(const KnobVector& v);

  double operator[](Knob k) const { return to_array()[static_cast<std::size_t>(k)]; }

  bool operator==(const KnobState&) const = default;
};

/// True iff every field is within its range (azimuth in [0, 360)).
bool in_range(const KnobState& k);

/// Wraps an angle in degrees onto [0, 360).
double wrap_360(double deg);
/// Wraps an angle difference in degrees onto (-180, 180].
double wrap_180(double deg);

/**
 * Moves every knob by raw_i * 5% of its span. `raw` components are clamped to
 * [-1, 1] first. Densities and altitude saturate at their bounds; azimuth
 * wraps. Knobs set in `frozen` keep their value.
 */
KnobState apply_action(const KnobState& knobs, const KnobVector& raw, const KnobMask& frozen = {});

}  // namespace edgegen
