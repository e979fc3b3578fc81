#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace edgegen {

/// The per-tick slice of a realization that rules look at.
struct RuleState {
  double ego_speed = 0.0;
  double gap = 0.0;
  bool collision_this_tick = false;
};

/// A time-ordered sequence of rule states.
using Realization = std::vector<RuleState>;

struct RewardWeights {
  double w_c = 500.0;
  double w_p = 100.0;

  void validate() const;
};

struct RulebookConfig {
  RewardWeights weights;
  double proximity_threshold = 5.0;  // m
  double rss_decel = 5.0;            // m/s^2, shared max braking of ego and lead

  void validate() const;
};

struct ViolationScores {
  double lambda_c = 0.0;
  double lambda_p = 0.0;

  ViolationScores& operator+=(const ViolationScores& o) {
    lambda_c += o.lambda_c;
    lambda_p += o.lambda_p;
    return *this;
  }
  double total() const { return lambda_c + lambda_p; }
  bool operator==(const ViolationScores&) const = default;
};

struct StepViolation {
  double alpha_c = 0.0;
  double alpha_p = 0.0;
};

/**
 * A rule scores a realization as the sum of a non-negative per-tick term;
 * zero means full compliance.
 */
struct Rule {
  std::string name;
  std::function<double(const RuleState&)> term;

  double score(std::span<const RuleState> realization) const;
};

/// Ego speed on ticks where the ego is in contact.
Rule collision_rule();
/// Ego speed on ticks where the gap is below `threshold`.
Rule proximity_rule(double threshold = 5.0);

/// An unordered set of rules evaluated over the same realization.
class Rulebook {
 public:
  Rulebook() = default;
  explicit Rulebook(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  void add(Rule rule) { rules_.push_back(std::move(rule)); }
  const std::vector<Rule>& rules() const { return rules_; }

  /// One score per rule, in registration order.
  std::vector<double> evaluate(std::span<const RuleState> realization) const;

 private:
  std::vector<Rule> rules_;
};

StepViolation step_violation(const RuleState& rs, double proximity_threshold = 5.0);

/// Collision and proximity scores of a realization.
ViolationScores evaluate(std::span<const RuleState> realization, double proximity_threshold = 5.0);

/// e^{-iou} + ln(1 + w_c alpha_c + w_p alpha_p).
double step_reward(double iou, double alpha_c, double alpha_p, const RewardWeights& w = {});

/// RSS minimum following distance with zero reaction time; throws InvalidConfig if decel <= 0.
double rss_min_distance(double ego_speed, double lead_speed, double decel = 5.0);

/// How far inside the RSS distance the ego is: max(0, d_min - gap).
double mfd_deficit(double gap, double d_min);

}  // namespace edgegen
