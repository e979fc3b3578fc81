#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edgegen/mlp.hpp"
#include "edgegen/rng.hpp"

namespace edgegen {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Trainable state of the agent: Gaussian policy (mean net + log-std) and a separate value net.
struct PolicyParams {
  Mlp policy;
  std::vector<double> log_std;
  Mlp value;

  /**
   * Fresh parameters. Hidden layers get orthogonal init with gain sqrt(2),
   * the mean head gain 0.01 (near-zero initial actions), the value head gain
   * 1. log_std starts at 0.
   */
  static PolicyParams create(std::size_t input_width, std::span<const std::size_t> hidden, std::size_t action_width,
                             RngStream& rng);
  /// Same shapes, every parameter zero.
  static PolicyParams zeros_like(const PolicyParams& p);

  std::size_t action_width() const { return log_std.size(); }
  std::size_t input_width() const { return policy.input_size(); }
  std::size_t size() const;

  /// Flat view in the order policy, log_std, value.
  std::vector<double> flat() const;
  void assign(std::span<const double> flat);

  bool all_finite() const;
  void clamp_log_std();

  bool operator==(const PolicyParams&) const = default;
};

struct PolicyOutput {
  std::vector<double> mean;
  std::vector<double> log_std;
  double value = 0.0;
};

PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> features);

/// Sum over dimensions of the diagonal-Gaussian log-density of `x`.
double gaussian_log_prob(std::span<const double> x, std::span<const double> mean, std::span<const double> log_std);

struct SampledAction {
  std::vector<double> action;  // clamped to [-1, 1]
  std::vector<double> raw;     // unclamped draw
  double log_prob = 0.0;       // density of `raw`
};

SampledAction sample_action(std::span<const double> mean, std::span<const double> log_std, RngStream& rng);

/// Zero-noise evaluation: clamp(mean, -1, 1).
std::vector<double> deterministic_action(std::span<const double> mean);

}  // namespace edgegen
