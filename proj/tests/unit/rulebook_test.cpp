#include <gtest/gtest.h>

#include <cmath>

#include "edgegen/errors.hpp"
#include "edgegen/rng.hpp"
#include "edgegen/rulebook.hpp"

namespace edgegen {
namespace {

TEST(StepViolation, Terms) {
  const StepViolation a = step_violation({12.0, 0.0, true});
  EXPECT_EQ(a.alpha_c, 12.0);
  const StepViolation b = step_violation({9.0, 6.0, false});
  EXPECT_EQ(b.alpha_c, 0.0);
  EXPECT_EQ(b.alpha_p, 0.0);
  const StepViolation c = step_violation({8.0, 4.2, false});
  EXPECT_EQ(c.alpha_c, 0.0);
  EXPECT_EQ(c.alpha_p, 8.0);
}

TEST(Evaluate, HandBuiltRealizations) {
  const Realization compliant{{10, 30, false}, {11, 25, false}, {12, 20, false}};
  EXPECT_EQ(evaluate(compliant), (ViolationScores{0.0, 0.0}));

  const Realization close{{8, 4, false}, {8, 3, false}, {8, 2, false}, {8, 7, false}};
  EXPECT_EQ(evaluate(close).lambda_p, 24.0);
  EXPECT_EQ(evaluate(close).lambda_c, 0.0);

  const Realization crash{{12, 10, false}, {12, 0, true}, {0, 0, true}};
  EXPECT_EQ(evaluate(crash), (ViolationScores{12.0, 12.0}));  // contact tick is also inside 5 m

  const Realization only_contact{{12, 6, true}};
  EXPECT_EQ(evaluate(only_contact), (ViolationScores{12.0, 0.0}));
}

TEST(Rulebook, UniformInterfaceMatchesEvaluate) {
  Rulebook book({collision_rule(), proximity_rule(5.0)});
  const Realization r{{8, 4, false}, {12, 0, true}, {0, 0, true}, {3, 4.9, false}};
  const std::vector<double> scores = book.evaluate(r);
  ASSERT_EQ(scores.size(), 2u);
  EXPECT_EQ(scores[0], evaluate(r).lambda_c);
  EXPECT_EQ(scores[1], evaluate(r).lambda_p);
  EXPECT_EQ(book.rules()[0].name, "collision");
  EXPECT_EQ(book.rules()[1].name, "proximity");
}

TEST(Rulebook, CustomRulePlugsIn) {
  Rulebook book;
  book.add({"speeding", [](const RuleState& s) { return s.ego_speed > 20 ? s.ego_speed - 20 : 0.0; }});
  EXPECT_EQ(book.evaluate(Realization{{25, 50, false}, {18, 50, false}, {22, 50, false}})[0], 7.0);
}

Realization random_realization(RngStream& rng, std::size_t n) {
  Realization r;
  for (std::size_t i = 0; i < n; ++i) r.push_back({rng.uniform(0, 30), rng.uniform(-1, 12), rng.bernoulli(0.1)});
  return r;
}

// Property: scores are additive over concatenation.
TEST(Evaluate, Additivity) {
  RngStream rng(21);
  for (int i = 0; i < 500; ++i) {
    const Realization a = random_realization(rng, rng.below(40) + 1);
    const Realization b = random_realization(rng, rng.below(40) + 1);
    Realization ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const ViolationScores whole = evaluate(ab);
    ViolationScores parts = evaluate(a);
    parts += evaluate(b);
    ASSERT_NEAR(whole.lambda_c, parts.lambda_c, 1e-9);
    ASSERT_NEAR(whole.lambda_p, parts.lambda_p, 1e-9);
  }
}

// Property: scaling every speed by c scales both scores by c.
TEST(Evaluate, LinearInSpeed) {
  RngStream rng(22);
  for (int i = 0; i < 500; ++i) {
    const Realization a = random_realization(rng, 30);
    const double c = rng.uniform(1.0, 4.0);
    Realization scaled = a;
    for (RuleState& s : scaled) s.ego_speed *= c;
    ASSERT_NEAR(evaluate(scaled).lambda_c, c * evaluate(a).lambda_c, 1e-9);
    ASSERT_NEAR(evaluate(scaled).lambda_p, c * evaluate(a).lambda_p, 1e-9);
  }
}

TEST(StepReward, Values) {
  EXPECT_EQ(step_reward(0.0, 0.0, 0.0), 1.0);
  EXPECT_NEAR(step_reward(0.8, 0.0, 10.0, {500, 100}), 7.358084, 1e-6);
  EXPECT_NEAR(step_reward(1.0, 15.0, 0.0), 9.290671, 1e-6);
  EXPECT_NEAR(step_reward(0.8, 0.0, 10.0), std::exp(-0.8) + std::log(1001.0), 1e-12);
}

// Property: increasing in alphas, decreasing in iou, bounded below by 1/e.
TEST(StepReward, MonotoneAndBounded) {
  RngStream rng(23);
  for (int i = 0; i < 5000; ++i) {
    const double iou = rng.uniform01(), ac = rng.uniform(0, 20), ap = rng.uniform(0, 20);
    const double r = step_reward(iou, ac, ap);
    ASSERT_GE(r, std::exp(-1.0));
    ASSERT_LT(r, step_reward(iou, ac + 0.5, ap));
    ASSERT_LT(r, step_reward(iou, ac, ap + 0.5));
    if (iou < 0.99) ASSERT_GT(r, step_reward(iou + 0.01, ac, ap));
  }
  EXPECT_EQ(step_reward(1.0, 0.0, 0.0), std::exp(-1.0));
}

TEST(Rss, MinimumDistance) {
  EXPECT_NEAR(rss_min_distance(20, 10, 5), 30.0, 1e-9);
  EXPECT_EQ(rss_min_distance(10, 10, 5), 0.0);
  EXPECT_EQ(rss_min_distance(8, 12, 5), 0.0);
  EXPECT_NEAR(rss_min_distance(15, 0, 5), 22.5, 1e-9);
  EXPECT_THROW(rss_min_distance(15, 0, 0), InvalidConfig);
  EXPECT_THROW(rss_min_distance(15, 0, -1), InvalidConfig);
}

TEST(Rss, Deficit) {
  EXPECT_EQ(mfd_deficit(20, 30), 10.0);
  EXPECT_EQ(mfd_deficit(35, 30), 0.0);
  EXPECT_NEAR(mfd_deficit(25, rss_min_distance(20, 10)), 5.0, 1e-9);
  RngStream rng(24);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(0, 50);
    ASSERT_EQ(mfd_deficit(d + rng.uniform(0, 10), d), 0.0);
  }
}

}  // namespace
}  // namespace edgegen
