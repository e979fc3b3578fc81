#include "edgegen/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edgegen/errors.hpp"

namespace edgegen {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

std::vector<std::size_t> widths(std::size_t in, std::span<const std::size_t> hidden, std::size_t out) {
  std::vector<std::size_t> w{in};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}
}  // namespace

PolicyParams PolicyParams::create(std::size_t input_width, std::span<const std::size_t> hidden,
                                  std::size_t action_width, RngStream& rng) {
  PolicyParams p;
  p.policy = Mlp(widths(input_width, hidden, action_width));
  p.value = Mlp(widths(input_width, hidden, 1));
  RngStream policy_rng = rng.split(1);
  RngStream value_rng = rng.split(2);
  p.policy.init_orthogonal(policy_rng, std::sqrt(2.0), 0.01);
  p.value.init_orthogonal(value_rng, std::sqrt(2.0), 1.0);
  p.log_std.assign(action_width, 0.0);
  return p;
}

PolicyParams PolicyParams::zeros_like(const PolicyParams& p) {
  PolicyParams z = p;
  z.policy.set_zero();
  z.value.set_zero();
  std::fill(z.log_std.begin(), z.log_std.end(), 0.0);
  return z;
}

std::size_t PolicyParams::size() const { return policy.param_count() + log_std.size() + value.param_count(); }

std::vector<double> PolicyParams::flat() const {
  std::vector<double> out;
  out.reserve(size());
  policy.append_to(out);
  out.insert(out.end(), log_std.begin(), log_std.end());
  value.append_to(out);
  return out;
}

void PolicyParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) throw InvalidArgument("flat parameter vector has the wrong size");
  std::size_t k = policy.assign_from(flat);
  std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(k), log_std.size(), log_std.begin());
  k += log_std.size();
  value.assign_from(flat.subspan(k));
}

bool PolicyParams::all_finite() const {
  const std::vector<double> f = flat();
  return std::all_of(f.begin(), f.end(), [](double x) { return std::isfinite(x); });
}

void PolicyParams::clamp_log_std() {
  for (double& s : log_std) s = std::clamp(s, kLogStdMin, kLogStdMax);
}

PolicyOutput policy_forward(const PolicyParams& params, std::span<const double> features) {
  PolicyOutput out;
  out.mean = params.policy.forward(features);
  out.log_std = params.log_std;
  out.value = params.value.forward(features)[0];
  return out;
}

double gaussian_log_prob(std::span<const double> x, std::span<const double> mean, std::span<const double> log_std) {
  double lp = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double z = (x[j] - mean[j]) * std::exp(-log_std[j]);
    lp += -0.5 * z * z - log_std[j] - kHalfLog2Pi;
  }
  return lp;
}

SampledAction sample_action(std::span<const double> mean, std::span<const double> log_std, RngStream& rng) {
  SampledAction s;
  s.raw.resize(mean.size());
  s.action.resize(mean.size());
  for (std::size_t j = 0; j < mean.size(); ++j) {
    s.raw[j] = mean[j] + std::exp(log_std[j]) * rng.normal();
    s.action[j] = std::clamp(s.raw[j], -1.0, 1.0);
  }
  s.log_prob = gaussian_log_prob(s.raw, mean, log_std);
  return s;
}

std::vector<double> deterministic_action(std::span<const double> mean) {
  std::vector<double> a(mean.begin(), mean.end());
  for (double& x : a) x = std::clamp(x, -1.0, 1.0);
  return a;
}

}  // namespace edgegen
