#include <gtest/gtest.h>

#include <vector>

#include "edgegen/errors.hpp"
#include "edgegen/failure.hpp"

namespace edgegen {
namespace {

struct Phase {
  int ticks;
  bool detected;
  double gap;
  double speed;
};

// Builds a history from phases, followed by one contact tick.
std::vector<TickObservation> history(const std::vector<Phase>& phases) {
  std::vector<TickObservation> h;
  for (const Phase& p : phases) {
    for (int i = 0; i < p.ticks; ++i) h.push_back({p.detected, p.gap, p.speed, false});
  }
  h.push_back({false, 0.0, 10.0, true});
  return h;
}

TEST(FailureMode, NoContactIsNone) {
  std::vector<TickObservation> h(200, TickObservation{true, 30.0, 10.0, false});
  EXPECT_EQ(classify_failure(h), FailureMode::kNone);
  EXPECT_EQ(classify_failure(std::vector<TickObservation>{}), FailureMode::kNone);
}

TEST(FailureMode, NonDetection) {
  EXPECT_EQ(classify_failure(history({{141, false, 20.0, 10.0}})), FailureMode::kNonDetection);
  EXPECT_EQ(classify_failure(history({})), FailureMode::kNonDetection);
  // Detection only after contact does not count.
  auto h = history({{60, false, 20.0, 10.0}});
  h.push_back({true, 0.0, 0.0, true});
  EXPECT_EQ(classify_failure(h), FailureMode::kNonDetection);
}

TEST(FailureMode, Intermittent) {
  // Tracked for ticks 0-100, lost for 101-140, contact at 141.
  const auto a = history({{101, true, 30.0, 10.0}, {40, false, 10.0, 10.0}});
  ASSERT_EQ(a.size(), 142u);
  EXPECT_EQ(classify_failure(a), FailureMode::kIntermittent);

  // Exactly dropout_ticks undetected inside the window after a detection.
  EXPECT_EQ(classify_failure(history({{50, true, 30.0, 10.0}, {10, false, 10.0, 10.0}})), FailureMode::kIntermittent);

  // Flickering track with no long dropout and an early first detection falls back to intermittent.
  std::vector<Phase> flicker;
  for (int i = 0; i < 20; ++i) {
    flicker.push_back({3, true, 40.0, 10.0});
    flicker.push_back({5, false, 40.0, 10.0});
  }
  EXPECT_EQ(classify_failure(history(flicker)), FailureMode::kIntermittent);
}

TEST(FailureMode, Delayed) {
  // First detection at gap 8 m while moving 20 m/s: stopping distance 25 m.
  EXPECT_EQ(classify_failure(history({{80, false, 30.0, 20.0}, {1, true, 8.0, 20.0}, {5, true, 6.0, 20.0}})),
            FailureMode::kDelayed);
  EXPECT_EQ(classify_failure(history({{1, true, 2.0, 10.0}})), FailureMode::kDelayed);
  // The dropout rule only counts undetected runs after a detection.
  EXPECT_EQ(classify_failure(history({{200, false, 30.0, 15.0}, {9, true, 10.0, 15.0}})), FailureMode::kDelayed);
}

TEST(FailureMode, DropoutOutsideWindowIgnored) {
  // Late first detection, a 20-tick loss long before contact, then continuous tracking for 60 ticks.
  const auto h = history({{10, true, 5.0, 20.0}, {20, false, 5.0, 20.0}, {60, true, 5.0, 20.0}});
  EXPECT_EQ(classify_failure(h), FailureMode::kDelayed);
  FailureConfig wide;
  wide.window_ticks = 200;
  EXPECT_EQ(classify_failure(h, wide), FailureMode::kIntermittent);
}

TEST(FailureMode, StringRoundTrip) {
  for (FailureMode m : {FailureMode::kNone, FailureMode::kNonDetection, FailureMode::kIntermittent,
                        FailureMode::kDelayed}) {
    EXPECT_EQ(failure_mode_from_string(to_string(m)), m);
  }
  EXPECT_EQ(to_string(FailureMode::kNonDetection), "non_detection");
  EXPECT_THROW(failure_mode_from_string("bogus"), ParseError);
}

}  // namespace
}  // namespace edgegen
