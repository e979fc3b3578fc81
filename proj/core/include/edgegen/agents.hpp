#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "edgegen/features.hpp"
#include "edgegen/knobs.hpp"
#include "edgegen/policy.hpp"
#include "edgegen/rng.hpp"

namespace edgegen {

enum class RunMode { kTrain, kEval };

/// What an agent decided on one tick; raw/log_prob/value are only meaningful for learners.
struct AgentDecision {
  KnobVector action{};
  KnobVector raw{};
  double log_prob = 0.0;
  double value = 0.0;
};

/// Uniform draw on [-1, 1] for every knob.
KnobVector act_random(RngStream& rng);
/// Leaves the knobs where they are.
KnobVector act_clear();

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual AgentDecision decide(const FeatureState& features, RunMode mode) = 0;
};

class ClearAgent final : public Agent {
 public:
  std::string name() const override { return "clear"; }
  AgentDecision decide(const FeatureState&, RunMode) override;
};

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(RngStream rng) : rng_(rng) {}
  std::string name() const override { return "random"; }
  AgentDecision decide(const FeatureState&, RunMode) override;

 private:
  RngStream rng_;
};

/// Gaussian policy; samples in train mode, uses the clamped mean in eval mode.
class PolicyAgent final : public Agent {
 public:
  PolicyAgent(const PolicyParams& params, RngStream rng) : params_(&params), rng_(rng) {}
  std::string name() const override { return "policy"; }
  AgentDecision decide(const FeatureState& features, RunMode mode) override;

 private:
  const PolicyParams* params_;
  RngStream rng_;
};

/// Replays a caller-supplied function of the tick index; used for constructed scenarios.
class ScriptedAgent final : public Agent {
 public:
  explicit ScriptedAgent(std::function<KnobVector(std::int64_t)> script, std::string name = "scripted")
      : script_(std::move(script)), name_(std::move(name)) {}
  std::string name() const override { return name_; }
  AgentDecision decide(const FeatureState&, RunMode) override;

 private:
  std::function<KnobVector(std::int64_t)> script_;
  std::string name_;
  std::int64_t tick_ = 0;
};

}  // namespace edgegen
