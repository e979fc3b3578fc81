#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "edgegen/policy.hpp"
#include "edgegen/rng.hpp"

namespace edgegen {

struct PpoConfig {
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_ratio = 0.2;
  double learn_rate = 3e-4;
  int epochs_per_update = 10;
  int minibatch_size = 64;
  double value_coeff = 0.5;
  double entropy_coeff = 0.0;
  double max_grad_norm = 0.5;  // per network; <= 0 disables clipping
  bool normalize_rewards = true;  // learner sees rewards divided by a running return std
  std::int64_t episode_len = 512;
  std::int64_t episodes_per_update = 4;
  std::int64_t total_steps = 40960;

  void validate() const;
  std::int64_t batch_size() const { return episode_len * episodes_per_update; }
  /// Number of whole updates that fit in total_steps.
  std::int64_t update_count() const { return total_steps / batch_size(); }
};

/// One update batch of interaction, all columns aligned.
struct RolloutBuffer {
  std::vector<std::vector<double>> features;
  std::vector<std::vector<double>> raw_actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> terminals;

  std::size_t size() const { return rewards.size(); }
  void clear();
  void push(std::span<const double> feature, std::span<const double> raw_action, double log_prob, double reward,
            double value, bool terminal);
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

/// Generalized advantage estimation with a zero bootstrap after each terminal step.
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const std::uint8_t> terminals, double gamma, double gae_lambda);

/// In-place shift/scale to zero mean and unit variance: (x - mean) / (std + eps).
void normalize_advantages(std::vector<double>& adv, double eps = 1e-8);

struct LossBreakdown {
  double loss = 0.0;       // minimized: -surrogate + c_v * value_mse - c_e * entropy
  double surrogate = 0.0;  // mean clipped objective
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
};

/**
 * PPO loss over buffer rows `indices`. When `grad` is non-null the analytic
 * gradient of `loss` is accumulated into it (same shapes as `params`).
 */
LossBreakdown ppo_loss(const PolicyParams& params, const RolloutBuffer& buf, std::span<const double> advantages,
                       std::span<const double> returns, std::span<const std::size_t> indices, const PpoConfig& cfg,
                       PolicyParams* grad = nullptr);

/// Mean clipped surrogate over the whole buffer.
double clipped_surrogate(const PolicyParams& params, const RolloutBuffer& buf, std::span<const double> advantages,
                         double clip_ratio);

/**
 * Running scale for rewards fed to the learner: each reward is divided by the
 * standard deviation of the discounted return accumulated so far. Statistics
 * use the parallel mean/variance update with a prior count of 1e-4.
 */
class RewardScaler {
 public:
  explicit RewardScaler(double gamma = 0.99) : gamma_(gamma) {}

  /// Scales one reward and advances the running return; `terminal` resets it afterwards.
  double scale(double reward, bool terminal);

  double count() const { return count_; }
  double mean() const { return mean_; }
  double var() const { return var_; }
  void restore(double count, double mean, double var);

 private:
  double gamma_;
  double ret_ = 0.0;
  double count_ = 1e-4;
  double mean_ = 0.0;
  double var_ = 1.0;
};

/// Adaptive-moment optimizer over a flat parameter vector.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  std::int64_t steps() const { return t_; }
  const std::vector<double>& first_moment() const { return m_; }
  const std::vector<double>& second_moment() const { return v_; }
  double learn_rate() const { return lr_; }
  void restore(std::int64_t t, std::vector<double> m, std::vector<double> v);

 private:
  double lr_ = 3e-4;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct TrainStats {
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;
  std::int64_t gradient_steps = 0;
};

/**
 * Runs epochs_per_update passes over shuffled minibatches of `buf`. `params`
 * and `opt` are only modified if every step succeeds; a non-finite loss or
 * gradient throws NonFiniteError and leaves both untouched.
 */
TrainStats ppo_update(PolicyParams& params, Adam& opt, const RolloutBuffer& buf, const PpoConfig& cfg,
                      RngStream& shuffle_rng);

}  // namespace edgegen
