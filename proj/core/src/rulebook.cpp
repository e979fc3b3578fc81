#include "edgegen/rulebook.hpp"

#include <algorithm>
#include <cmath>

#include "edgegen/errors.hpp"

namespace edgegen {

void RewardWeights::validate() const {
  if (!(w_c > 0.0) || !(w_p > 0.0)) throw InvalidConfig("rulebook weights must be > 0");
}

void RulebookConfig::validate() const {
  weights.validate();
  if (!(proximity_threshold >= 0.0)) throw InvalidConfig("rulebook.proximity_threshold must be >= 0");
  if (!(rss_decel > 0.0)) throw InvalidConfig("rulebook.rss_decel must be > 0");
}

double Rule::score(std::span<const RuleState> realization) const {
  double sum = 0.0;
  for (const RuleState& rs : realization) sum += term(rs);
  return sum;
}

Rule collision_rule() {
  return {"collision", [](const RuleState& rs) { return rs.collision_this_tick ? rs.ego_speed : 0.0; }};
}

Rule proximity_rule(double threshold) {
  return {"proximity", [threshold](const RuleState& rs) { return rs.gap < threshold ? rs.ego_speed : 0.0; }};
}

std::vector<double> Rulebook::evaluate(std::span<const RuleState> realization) const {
  std::vector<double> scores;
  scores.reserve(rules_.size());
  for (const Rule& r : rules_) scores.push_back(r.score(realization));
  return scores;
}

StepViolation step_violation(const RuleState& rs, double proximity_threshold) {
  return {rs.collision_this_tick ? rs.ego_speed : 0.0, rs.gap < proximity_threshold ? rs.ego_speed : 0.0};
}

ViolationScores evaluate(std::span<const RuleState> realization, double proximity_threshold) {
  const Rulebook book({collision_rule(), proximity_rule(proximity_threshold)});
  const std::vector<double> s = book.evaluate(realization);
  return {s[0], s[1]};
}

double step_reward(double iou, double alpha_c, double alpha_p, const RewardWeights& w) {
  return std::exp(-iou) + std::log1p(w.w_c * alpha_c + w.w_p * alpha_p);
}

double rss_min_distance(double ego_speed, double lead_speed, double decel) {
  if (!(decel > 0.0)) throw InvalidConfig("RSS deceleration must be > 0");
  return std::max(0.0, (ego_speed * ego_speed - lead_speed * lead_speed) / (2.0 * decel));
}

double mfd_deficit(double gap, double d_min) { return std::max(0.0, d_min - gap); }

}  // namespace edgegen
