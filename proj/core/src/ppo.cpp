#include "edgegen/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "edgegen/errors.hpp"

namespace edgegen {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidConfig("ppo.gamma must be in (0, 1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0)) throw InvalidConfig("ppo.gae_lambda must be in (0, 1]");
  if (!(clip_ratio > 0.0 && clip_ratio < 1.0)) throw InvalidConfig("ppo.clip_ratio must be in (0, 1)");
  if (!(learn_rate > 0.0)) throw InvalidConfig("ppo.learn_rate must be > 0");
  if (epochs_per_update <= 0) throw InvalidConfig("ppo.epochs_per_update must be > 0");
  if (minibatch_size <= 0) throw InvalidConfig("ppo.minibatch_size must be > 0");
  if (!(value_coeff >= 0.0) || !(entropy_coeff >= 0.0)) throw InvalidConfig("ppo loss coefficients must be >= 0");
  if (episode_len <= 0) throw InvalidConfig("ppo.episode_len must be > 0");
  if (episodes_per_update <= 0) throw InvalidConfig("ppo.episodes_per_update must be > 0");
  if (total_steps <= 0) throw InvalidConfig("ppo.total_steps must be > 0");
}

void RolloutBuffer::clear() {
  features.clear();
  raw_actions.clear();
  log_probs.clear();
  rewards.clear();
  values.clear();
  terminals.clear();
}

void RolloutBuffer::push(std::span<const double> feature, std::span<const double> raw_action, double log_prob,
                         double reward, double value, bool terminal) {
  features.emplace_back(feature.begin(), feature.end());
  raw_actions.emplace_back(raw_action.begin(), raw_action.end());
  log_probs.push_back(log_prob);
  rewards.push_back(reward);
  values.push_back(value);
  terminals.push_back(terminal ? 1 : 0);
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const std::uint8_t> terminals, double gamma, double gae_lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || terminals.size() != n) throw InvalidArgument("gae: sequences are not aligned");
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    const bool last = terminals[t] != 0 || t + 1 == n;
    const double next_value = last ? 0.0 : values[t + 1];
    const double carry = last ? 0.0 : running;
    const double delta = rewards[t] + gamma * next_value - values[t];
    running = delta + gamma * gae_lambda * carry;
    out.advantages[t] = running;
    out.returns[t] = running + values[t];
  }
  return out;
}

void normalize_advantages(std::vector<double>& adv, double eps) {
  if (adv.empty()) return;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double sd = std::sqrt(var / n);
  for (double& a : adv) a = (a - mean) / (sd + eps);
}

LossBreakdown ppo_loss(const PolicyParams& params, const RolloutBuffer& buf, std::span<const double> advantages,
                       std::span<const double> returns, std::span<const std::size_t> indices, const PpoConfig& cfg,
                       PolicyParams* grad) {
  LossBreakdown out;
  if (indices.empty()) return out;
  const double inv_b = 1.0 / static_cast<double>(indices.size());
  const std::size_t dims = params.action_width();
  const double lo = 1.0 - cfg.clip_ratio;
  const double hi = 1.0 + cfg.clip_ratio;

  std::vector<double> inv_std(dims);
  double entropy_per_sample = 0.0;
  for (std::size_t j = 0; j < dims; ++j) {
    inv_std[j] = std::exp(-params.log_std[j]);
    entropy_per_sample += params.log_std[j] + 0.5 + 0.5 * std::log(2.0 * std::numbers::pi);
  }

  Mlp::Tape policy_tape;
  Mlp::Tape value_tape;
  std::vector<double> d_mean(dims);
  for (const std::size_t i : indices) {
    const std::vector<double>& x = buf.features[i];
    const std::vector<double>& raw = buf.raw_actions[i];
    const std::vector<double> mean = params.policy.forward(x, grad ? &policy_tape : nullptr);
    const double value = params.value.forward(x, grad ? &value_tape : nullptr)[0];

    const double log_prob = gaussian_log_prob(raw, mean, params.log_std);
    const double log_ratio = log_prob - buf.log_probs[i];
    const double ratio = std::exp(log_ratio);
    const double adv = advantages[i];
    const double unclipped = ratio * adv;
    const double clipped = std::clamp(ratio, lo, hi) * adv;
    const bool use_unclipped = unclipped <= clipped;
    out.surrogate += std::min(unclipped, clipped);
    out.approx_kl += (ratio - 1.0) - log_ratio;
    if (std::abs(ratio - 1.0) > cfg.clip_ratio) out.clip_fraction += 1.0;
    const double value_err = value - returns[i];
    out.value_loss += value_err * value_err;

    if (!grad) continue;
    // d loss / d log_prob; zero when the clipped branch is active.
    const double d_lp = use_unclipped ? -inv_b * adv * ratio : 0.0;
    for (std::size_t j = 0; j < dims; ++j) {
      const double z = (raw[j] - mean[j]) * inv_std[j];
      d_mean[j] = d_lp * z * inv_std[j];
      grad->log_std[j] += d_lp * (z * z - 1.0);
    }
    params.policy.backward(policy_tape, d_mean, grad->policy);
    const double d_value = 2.0 * cfg.value_coeff * inv_b * value_err;
    params.value.backward(value_tape, std::span<const double>(&d_value, 1), grad->value);
  }

  out.surrogate *= inv_b;
  out.approx_kl *= inv_b;
  out.clip_fraction *= inv_b;
  out.value_loss *= inv_b;
  out.entropy = entropy_per_sample;
  out.loss = -out.surrogate + cfg.value_coeff * out.value_loss - cfg.entropy_coeff * out.entropy;
  if (grad) {
    for (double& g : grad->log_std) g -= cfg.entropy_coeff;
  }
  return out;
}

double clipped_surrogate(const PolicyParams& params, const RolloutBuffer& buf, std::span<const double> advantages,
                         double clip_ratio) {
  std::vector<std::size_t> all(buf.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  PpoConfig cfg;
  cfg.clip_ratio = clip_ratio;
  return ppo_loss(params, buf, advantages, buf.values, all, cfg).surrogate;
}

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw InvalidArgument("Adam: size mismatch");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
    v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
    params[k] -= lr_ * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps_);
  }
}

void Adam::restore(std::int64_t t, std::vector<double> m, std::vector<double> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) throw InvalidArgument("Adam: restored moments have wrong size");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

double RewardScaler::scale(double reward, bool terminal) {
  ret_ = ret_ * gamma_ + reward;
  // One-sample batch of the parallel variance update.
  const double delta = ret_ - mean_;
  const double total = count_ + 1.0;
  mean_ += delta / total;
  var_ = (var_ * count_ + delta * delta * count_ / total) / total;
  count_ = total;
  if (terminal) ret_ = 0.0;
  return reward / std::sqrt(var_ + 1e-8);
}

void RewardScaler::restore(double count, double mean, double var) {
  if (!(count > 0.0) || !(var >= 0.0)) throw InvalidArgument("RewardScaler: invalid restored statistics");
  count_ = count;
  mean_ = mean;
  var_ = var;
  ret_ = 0.0;
}

namespace {

void clip_norm(std::span<double> g, double max_norm) {
  if (max_norm <= 0.0) return;
  double sq = 0.0;
  for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / (norm + 1e-6);
    for (double& v : g) v *= scale;
  }
}

}  // namespace

TrainStats ppo_update(PolicyParams& params, Adam& opt, const RolloutBuffer& buf, const PpoConfig& cfg,
                      RngStream& shuffle_rng) {
  const std::size_t n = buf.size();
  if (n == 0) throw InvalidArgument("ppo_update: empty rollout buffer");

  GaeResult g = gae(buf.rewards, buf.values, buf.terminals, cfg.gamma, cfg.gae_lambda);
  normalize_advantages(g.advantages);

  PolicyParams work = params;
  Adam work_opt = opt;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t mb = static_cast<std::size_t>(cfg.minibatch_size);

  TrainStats stats;
  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[shuffle_rng.below(k)]);
    for (std::size_t start = 0; start < n; start += mb) {
      const std::span<const std::size_t> batch(order.data() + start, std::min(mb, n - start));
      PolicyParams grad = PolicyParams::zeros_like(work);
      const LossBreakdown lb = ppo_loss(work, buf, g.advantages, g.returns, batch, cfg, &grad);

      std::vector<double> flat_grad = grad.flat();
      double norm_sq = 0.0;
      for (double v : flat_grad) norm_sq += v * v;
      if (!std::isfinite(lb.loss) || !std::isfinite(norm_sq)) {
        throw NonFiniteError("ppo_update: non-finite loss or gradient at epoch " + std::to_string(epoch) +
                             ", gradient step " + std::to_string(stats.gradient_steps) +
                             " (loss=" + std::to_string(lb.loss) + ")");
      }
      // Policy (mean net + log_std) and value net are clipped separately so the
      // value loss, which scales with the return magnitude, cannot shrink the policy step.
      const std::size_t policy_part = work.policy.param_count() + work.log_std.size();
      clip_norm(std::span(flat_grad).first(policy_part), cfg.max_grad_norm);
      clip_norm(std::span(flat_grad).subspan(policy_part), cfg.max_grad_norm);
      std::vector<double> flat = work.flat();
      work_opt.step(flat, flat_grad);
      work.assign(flat);
      work.clamp_log_std();

      stats.surrogate += lb.surrogate;
      stats.value_loss += lb.value_loss;
      stats.entropy += lb.entropy;
      stats.approx_kl += lb.approx_kl;
      stats.clip_fraction += lb.clip_fraction;
      ++stats.gradient_steps;
    }
  }
  if (!work.all_finite()) throw NonFiniteError("ppo_update: parameters became non-finite");

  const double steps = static_cast<double>(stats.gradient_steps);
  stats.surrogate /= steps;
  stats.value_loss /= steps;
  stats.entropy /= steps;
  stats.approx_kl /= steps;
  stats.clip_fraction /= steps;
  params = std::move(work);
  opt = std::move(work_opt);
  return stats;
}

}  // namespace edgegen
