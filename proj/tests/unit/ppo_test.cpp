#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "edgegen/errors.hpp"
#include "edgegen/ppo.hpp"
#include "edgegen/rng.hpp"

namespace edgegen {
namespace {

// Direct discounted sum of TD residuals up to the episode end; O(T^2).
std::vector<double> brute_force_advantages(const std::vector<double>& r, const std::vector<double>& v,
                                           const std::vector<std::uint8_t>& term, double gamma, double lambda) {
  const std::size_t n = r.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      const double next_v = (term[k] || k + 1 == n) ? 0.0 : v[k + 1];
      const double delta = r[k] + gamma * next_v - v[k];
      adv[t] += weight * delta;
      if (term[k]) break;
      weight *= gamma * lambda;
    }
  }
  return adv;
}

TEST(Gae, SingleTerminalStep) {
  const std::vector<double> r{1.0}, v{0.0};
  const std::vector<std::uint8_t> term{1};
  const GaeResult g = gae(r, v, term, 0.99, 0.95);
  EXPECT_EQ(g.advantages, std::vector<double>{1.0});
  EXPECT_EQ(g.returns, std::vector<double>{1.0});
}

TEST(Gae, TwoStepUndiscounted) {
  const std::vector<double> r{1.0, 1.0}, v{0.0, 0.0};
  const std::vector<std::uint8_t> term{0, 1};
  EXPECT_EQ(gae(r, v, term, 1.0, 1.0).advantages, (std::vector<double>{2.0, 1.0}));
}

TEST(Gae, AllZero) {
  const std::vector<double> z(10, 0.0);
  const std::vector<std::uint8_t> term(10, 0);
  for (double a : gae(z, z, term, 0.99, 0.95).advantages) EXPECT_EQ(a, 0.0);
}

TEST(Gae, MatchesBruteForceOracle) {
  RngStream rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = rng.below(64) + 1;
    std::vector<double> r(n), v(n);
    std::vector<std::uint8_t> term(n);
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = rng.uniform(-5, 10);
      v[i] = rng.uniform(-3, 3);
      term[i] = rng.bernoulli(0.1) ? 1 : 0;
    }
    const double gamma = rng.uniform(0.5, 1.0), lambda = rng.uniform(0.0, 1.0);
    const GaeResult g = gae(r, v, term, gamma, lambda);
    const std::vector<double> oracle = brute_force_advantages(r, v, term, gamma, lambda);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_NEAR(g.advantages[i], oracle[i], 1e-10);
      ASSERT_NEAR(g.returns[i], oracle[i] + v[i], 1e-10);
    }
  }
}

TEST(Gae, NormalizeAdvantages) {
  std::vector<double> a{1, 2, 3, 4, 10};
  normalize_advantages(a);
  const double mean = std::accumulate(a.begin(), a.end(), 0.0) / 5;
  double var = 0.0;
  for (double x : a) var += (x - mean) * (x - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(var / 5, 1.0, 1e-6);
}

// Tiny policy (11 -> 4 -> 5), log-std and a linear value head: 73 + 5 + 12 = 90 parameters.
PolicyParams tiny_params(RngStream& rng) {
  PolicyParams p;
  const std::vector<std::size_t> pw{11, 4, 5}, vw{11, 1};
  p.policy = Mlp(pw);
  p.value = Mlp(vw);
  RngStream a = rng.split(1), b = rng.split(2);
  p.policy.init_orthogonal(a, 1.0, 1.0);
  p.value.init_orthogonal(b, 1.0, 1.0);
  for (int i = 0; i < 5; ++i) p.log_std.push_back(rng.uniform(-0.5, 0.3));
  std::vector<double> flat = p.flat();
  for (double& x : flat) x += rng.uniform(-0.1, 0.1);  // non-zero biases
  p.assign(flat);
  return p;
}

struct Batch {
  RolloutBuffer buf;
  std::vector<double> adv;
  std::vector<double> ret;
};

// Stored log-probs are offset from the current policy so both clip branches occur, away from the kinks.
Batch tiny_batch(const PolicyParams& p, RngStream& rng, std::size_t n) {
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(11);
    for (double& v : x) v = rng.uniform(-1, 1);
    const PolicyOutput out = policy_forward(p, x);
    const SampledAction s = sample_action(out.mean, out.log_std, rng);
    double offset = 0.0;
    switch (i % 3) {
      case 0: offset = rng.uniform(-0.1, 0.1); break;  // inside the clip band
      case 1: offset = rng.uniform(-0.9, -0.4); break;  // ratio well above 1 + clip
      default: offset = rng.uniform(0.4, 0.9); break;   // ratio well below 1 - clip
    }
    b.buf.push(x, s.raw, s.log_prob + offset, rng.uniform(-1, 1), out.value, i + 1 == n);
    b.adv.push_back(rng.uniform(-2, 2));
    b.ret.push_back(rng.uniform(-2, 2));
  }
  return b;
}

TEST(PpoLoss, AnalyticGradientMatchesFiniteDifferences) {
  RngStream rng(41);
  const PolicyParams p = tiny_params(rng);
  ASSERT_LE(p.size(), 100u);
  const Batch b = tiny_batch(p, rng, 48);
  std::vector<std::size_t> idx(b.buf.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  PpoConfig cfg;
  cfg.entropy_coeff = 0.01;

  PolicyParams grad = PolicyParams::zeros_like(p);
  ppo_loss(p, b.buf, b.adv, b.ret, idx, cfg, &grad);
  const std::vector<double> analytic = grad.flat();

  const double h = 1e-5;
  const std::vector<double> base = p.flat();
  double max_rel = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    PolicyParams plus = p, minus = p;
    std::vector<double> fp = base, fm = base;
    fp[k] += h;
    fm[k] -= h;
    plus.assign(fp);
    minus.assign(fm);
    const double numeric = (ppo_loss(plus, b.buf, b.adv, b.ret, idx, cfg).loss -
                            ppo_loss(minus, b.buf, b.adv, b.ret, idx, cfg).loss) /
                           (2 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[k]), 1e-6});
    max_rel = std::max(max_rel, std::abs(numeric - analytic[k]) / denom);
  }
  EXPECT_LE(max_rel, 1e-4);
}

TEST(PpoLoss, RatioOneSurrogateIsMeanAdvantage) {
  RngStream rng(42);
  const PolicyParams p = tiny_params(rng);
  RolloutBuffer buf;
  std::vector<double> adv;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> x(11);
    for (double& v : x) v = rng.uniform(-1, 1);
    const PolicyOutput out = policy_forward(p, x);
    const SampledAction s = sample_action(out.mean, out.log_std, rng);
    buf.push(x, s.raw, s.log_prob, 0.0, out.value, false);
    adv.push_back(rng.uniform(-1, 1));
  }
  const double mean_adv = std::accumulate(adv.begin(), adv.end(), 0.0) / 20;
  EXPECT_NEAR(clipped_surrogate(p, buf, adv, 0.2), mean_adv, 1e-12);
}

TEST(PpoLoss, ClipBranchUsesClippedRatio) {
  RngStream rng(43);
  const PolicyParams p = tiny_params(rng);
  std::vector<double> x(11, 0.1);
  const PolicyOutput out = policy_forward(p, x);
  const SampledAction s = sample_action(out.mean, out.log_std, rng);
  RolloutBuffer buf;
  buf.push(x, s.raw, s.log_prob - std::log(1.5), 0.0, 0.0, true);  // ratio 1.5
  const std::vector<double> adv{2.0};
  EXPECT_NEAR(clipped_surrogate(p, buf, adv, 0.2), 1.2 * 2.0, 1e-12);
  const std::vector<double> neg{-2.0};
  EXPECT_NEAR(clipped_surrogate(p, buf, neg, 0.2), 1.5 * -2.0, 1e-12);
}

// Property: one update on a frozen synthetic buffer raises the clipped surrogate.
TEST(PpoUpdate, ImprovesSurrogateOnFrozenBuffer) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RngStream rng(seed);
    const std::vector<std::size_t> hidden{64, 64};
    PolicyParams p = PolicyParams::create(12, hidden, 5, rng);
    RolloutBuffer buf;
    for (int i = 0; i < 256; ++i) {
      std::vector<double> x(12);
      for (double& v : x) v = rng.uniform(-1, 1);
      const PolicyOutput out = policy_forward(p, x);
      const SampledAction s = sample_action(out.mean, out.log_std, rng);
      const double reward = s.raw[0] - 0.5 * s.raw[1] + 0.1 * x[0];
      buf.push(x, s.raw, s.log_prob, reward, out.value, i % 64 == 63);
    }
    PpoConfig cfg;
    GaeResult g = gae(buf.rewards, buf.values, buf.terminals, cfg.gamma, cfg.gae_lambda);
    normalize_advantages(g.advantages);
    const double before = clipped_surrogate(p, buf, g.advantages, cfg.clip_ratio);

    Adam opt(p.size(), cfg.learn_rate);
    RngStream shuffle(seed + 100);
    const TrainStats stats = ppo_update(p, opt, buf, cfg, shuffle);
    const double after = clipped_surrogate(p, buf, g.advantages, cfg.clip_ratio);
    EXPECT_GT(after, before) << "seed " << seed;
    EXPECT_EQ(stats.gradient_steps, cfg.epochs_per_update * 4);
    EXPECT_TRUE(p.all_finite());
  }
}

TEST(PpoUpdate, NonFiniteBufferLeavesParamsUntouched) {
  RngStream rng(5);
  const std::vector<std::size_t> hidden{8};
  PolicyParams p = PolicyParams::create(12, hidden, 5, rng);
  RolloutBuffer buf;
  for (int i = 0; i < 64; ++i) {
    std::vector<double> x(12, 0.1);
    std::vector<double> raw(5, 0.0);
    buf.push(x, raw, 0.0, i == 10 ? std::nan("") : 1.0, 0.0, i == 63);
  }
  const PolicyParams before = p;
  PpoConfig cfg;
  Adam opt(p.size(), cfg.learn_rate);
  RngStream shuffle(1);
  EXPECT_THROW(ppo_update(p, opt, buf, cfg, shuffle), NonFiniteError);
  EXPECT_EQ(p, before);
  EXPECT_EQ(opt.steps(), 0);
}

TEST(Adam, FirstStepMovesBySignTimesLr) {
  Adam opt(3, 0.1);
  std::vector<double> x{1.0, 1.0, 1.0};
  const std::vector<double> g{2.0, -0.5, 0.0};
  opt.step(x, g);
  EXPECT_NEAR(x[0], 0.9, 1e-8);
  EXPECT_NEAR(x[1], 1.1, 1e-8);
  EXPECT_EQ(x[2], 1.0);
}

TEST(RewardScaler, MatchesDirectReturnStatistics) {
  RewardScaler s(0.9);
  const std::vector<double> rewards{1, 2, 3, 4};
  std::vector<double> returns;
  double ret = 0.0;
  double last = 0.0;
  for (double r : rewards) {
    ret = 0.9 * ret + r;
    returns.push_back(ret);
    last = s.scale(r, false);
  }
  // With the 1e-4 prior the running statistics are within 1e-4 of the plain sample moments.
  const double mean = std::accumulate(returns.begin(), returns.end(), 0.0) / 4;
  double var = 0.0;
  for (double x : returns) var += (x - mean) * (x - mean);
  var /= 4;
  EXPECT_NEAR(s.mean(), mean, 1e-3);
  EXPECT_NEAR(s.var(), var, 1e-2);
  EXPECT_NEAR(last, 4.0 / std::sqrt(s.var() + 1e-8), 1e-12);
}

TEST(PpoConfig, Validation) {
  PpoConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.update_count(), 20);
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = PpoConfig{};
  c.clip_ratio = 1.0;
  EXPECT_THROW(c.validate(), InvalidConfig);
  c = PpoConfig{};
  c.total_steps = 0;
  EXPECT_THROW(c.validate(), InvalidConfig);
}

}  // namespace
}  // namespace edgegen
