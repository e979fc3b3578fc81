#include "edgegen/agents.hpp"

#include <algorithm>

#include "edgegen/errors.hpp"

namespace edgegen {

KnobVector act_random(RngStream& rng) {
  KnobVector a{};
  for (double& x : a) x = rng.uniform(-1.0, 1.0);
  return a;
}

KnobVector act_clear() { return {}; }

AgentDecision ClearAgent::decide(const FeatureState&, RunMode) {
  AgentDecision d;
  d.action = act_clear();
  d.raw = d.action;
  return d;
}

AgentDecision RandomAgent::decide(const FeatureState&, RunMode) {
  AgentDecision d;
  d.action = act_random(rng_);
  d.raw = d.action;
  return d;
}

AgentDecision PolicyAgent::decide(const FeatureState& features, RunMode mode) {
  if (params_->action_width() != kKnobCount) throw InvalidArgument("policy action width must equal the knob count");
  const PolicyOutput out = policy_forward(*params_, features);
  AgentDecision d;
  d.value = out.value;
  if (mode == RunMode::kEval) {
    const std::vector<double> a = deterministic_action(out.mean);
    std::copy(a.begin(), a.end(), d.action.begin());
    std::copy(out.mean.begin(), out.mean.end(), d.raw.begin());
    d.log_prob = gaussian_log_prob(out.mean, out.mean, out.log_std);
    return d;
  }
  const SampledAction s = sample_action(out.mean, out.log_std, rng_);
  std::copy(s.action.begin(), s.action.end(), d.action.begin());
  std::copy(s.raw.begin(), s.raw.end(), d.raw.begin());
  d.log_prob = s.log_prob;
  return d;
}

AgentDecision ScriptedAgent::decide(const FeatureState&, RunMode) {
  AgentDecision d;
  d.action = script_(tick_++);
  for (double& x : d.action) x = std::clamp(x, -1.0, 1.0);
  d.raw = d.action;
  return d;
}

}  // namespace edgegen
