#include <gtest/gtest.h>

#include <cmath>

#include "edgegen/agents.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/errors.hpp"
#include "edgegen/rulebook.hpp"
#include "support.hpp"

namespace edgegen {
namespace {

using testing::cruise_scene;

EnvConfig short_env(std::int64_t len = 256) {
  EnvConfig env;
  env.episode_len = len;
  return env;
}

KnobVector fog_up(std::int64_t) { return {1.0, 0.0, 0.0, 0.0, 0.0}; }

TEST(Episode, ClearAgentFollowsSafely) {
  ClearAgent agent;
  const EpisodeRecord rec = run_episode(agent, cruise_scene(30.0, 10.0, 10.0), short_env(), RunMode::kEval);
  ASSERT_EQ(rec.rows.size(), 256u);
  EXPECT_FALSE(rec.collided());
  EXPECT_EQ(rec.totals.lambda_c, 0.0);
  EXPECT_EQ(rec.failure, FailureMode::kNone);
  EXPECT_FALSE(rec.aborted);
  EXPECT_EQ(rec.agent, "clear");
  EXPECT_EQ(rec.scene_id, "test-scene");
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    EXPECT_EQ(rec.rows[i].tick, static_cast<std::int64_t>(i) + 1);
    EXPECT_EQ(rec.rows[i].knobs, KnobState::clear().to_array());
  }
}

TEST(Episode, Deterministic) {
  Scene s = cruise_scene(35.0, 14.0, 8.0, 77);
  s.lead_events.push_back({40, 30, 2.0});
  RandomAgent a(RngStream(3)), b(RngStream(3));
  EXPECT_EQ(run_episode(a, s, short_env(), RunMode::kEval), run_episode(b, s, short_env(), RunMode::kEval));
}

TEST(Episode, DenseFogCausesCollision) {
  ScriptedAgent agent(fog_up, "fog");
  const EpisodeRecord rec = run_episode(agent, cruise_scene(40.0, 15.0, 5.0), short_env(), RunMode::kEval);
  EXPECT_TRUE(rec.collided());
  EXPECT_GT(rec.totals.lambda_c, 0.0);
  EXPECT_NE(rec.failure, FailureMode::kNone);
  EXPECT_EQ(rec.rows.back().knobs[0], 1.0);
}

TEST(Episode, TotalsMatchRulebookOverRows) {
  RandomAgent agent(RngStream(12));
  Scene s = cruise_scene(25.0, 13.0, 9.0, 5);
  s.lead_events.push_back({30, 40, 0.0});
  const EnvConfig env = short_env();
  const EpisodeRecord rec = run_episode(agent, s, env, RunMode::kEval);
  const ViolationScores expected = evaluate(realization_of(rec.rows), env.rulebook.proximity_threshold);
  EXPECT_NEAR(rec.totals.lambda_c, expected.lambda_c, 1e-9);
  EXPECT_NEAR(rec.totals.lambda_p, expected.lambda_p, 1e-9);
  EXPECT_EQ(recompute_totals(rec.rows, env.rulebook), rec.totals);
  double reward = 0.0;
  for (const EpisodeRow& r : rec.rows) {
    EXPECT_NEAR(r.reward, step_reward(r.iou, r.alpha_c, r.alpha_p, env.rulebook.weights), 1e-12);
    reward += r.reward;
  }
  EXPECT_NEAR(rec.totals.reward, reward, 1e-9);
}

TEST(Episode, SinkRecordsEveryTransition) {
  Scene s = cruise_scene(30.0, 12.0, 10.0, 4);
  RngStream rng(1);
  const std::vector<std::size_t> hidden{16};
  const PolicyParams params = PolicyParams::create(kFeatureCount, hidden, kKnobCount, rng);
  PolicyAgent agent(params, RngStream(2));
  RolloutBuffer buf;
  const EpisodeRecord rec = run_episode(agent, s, short_env(64), RunMode::kTrain, &buf);
  ASSERT_EQ(buf.size(), 64u);
  for (std::size_t i = 0; i < 64; ++i) {
    EXPECT_EQ(buf.rewards[i], rec.rows[i].reward);
    EXPECT_EQ(buf.terminals[i], i == 63 ? 1 : 0);
    EXPECT_EQ(buf.features[i].size(), kFeatureCount);
  }
}

TEST(EpisodeLog, RoundTripAndVerify) {
  ScriptedAgent agent(fog_up, "fog");
  const EnvConfig env = short_env();
  const EpisodeRecord rec = run_episode(agent, cruise_scene(40.0, 15.0, 5.0), env, RunMode::kEval);
  const EpisodeLog log = parse_episode_jsonl(episode_to_jsonl(rec, env));
  EXPECT_EQ(log.record, rec);
  EXPECT_EQ(log.episode_len, 256);
  const ReplayCheck check = verify_episode(log);
  EXPECT_TRUE(check.ok);
  EXPECT_TRUE(check.mismatches.empty());
  EXPECT_EQ(check.recomputed_failure, rec.failure);
}

TEST(EpisodeLog, TamperingIsDetected) {
  ClearAgent agent;
  const EnvConfig env = short_env(64);
  const EpisodeRecord rec = run_episode(agent, cruise_scene(30.0, 10.0, 10.0), env, RunMode::kEval);
  EpisodeLog log = parse_episode_jsonl(episode_to_jsonl(rec, env));
  log.record.totals.lambda_p += 1.0;
  EXPECT_FALSE(verify_episode(log).ok);

  log = parse_episode_jsonl(episode_to_jsonl(rec, env));
  log.record.failure = FailureMode::kDelayed;
  EXPECT_FALSE(verify_episode(log).ok);

  log = parse_episode_jsonl(episode_to_jsonl(rec, env));
  log.record.rows[10].alpha_p += 3.0;
  EXPECT_FALSE(verify_episode(log).ok);
}

TEST(EpisodeLog, MalformedInputThrows) {
  ClearAgent agent;
  const EnvConfig env = short_env(16);
  const std::string text = episode_to_jsonl(run_episode(agent, cruise_scene(30.0, 10.0, 10.0), env, RunMode::kEval), env);
  EXPECT_THROW(parse_episode_jsonl(text.substr(0, text.size() / 2)), ParseError);
  EXPECT_THROW(parse_episode_jsonl(""), ParseError);
  EXPECT_THROW(parse_episode_jsonl("{\"type\": \"header\"}\n"), ParseError);
}

TEST(EnvConfig, Validation) {
  EnvConfig env;
  EXPECT_NO_THROW(env.validate());
  env.episode_len = 0;
  EXPECT_THROW(env.validate(), InvalidConfig);
}

}  // namespace
}  // namespace edgegen
