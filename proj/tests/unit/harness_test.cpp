#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include "edgegen/catalog.hpp"
#include "edgegen/checkpoint.hpp"
#include "edgegen/config.hpp"
#include "edgegen/errors.hpp"
#include "edgegen/evaluation.hpp"
#include "edgegen/io.hpp"
#include "edgegen/training.hpp"
#include "support.hpp"

namespace edgegen {
namespace {

using testing::TempDir;

HarnessConfig tiny_config() {
  HarnessConfig cfg;
  cfg.ppo.episode_len = 128;
  cfg.ppo.episodes_per_update = 4;
  cfg.ppo.total_steps = 1024;
  cfg.ppo.epochs_per_update = 2;
  cfg.training.hidden = {16, 16};
  cfg.training.seed = 5;
  cfg.eval.subset_size = 6;
  return cfg;
}

SceneCatalog tiny_catalog() {
  GeneratorConfig g;
  g.count = 12;
  return generate(g, 99);
}

TEST(Training, ProducesOneCurveRowPerUpdate) {
  const HarnessConfig cfg = tiny_config();
  const TrainResult r = train_policy(tiny_catalog(), cfg, nullptr, std::nullopt, {});
  EXPECT_EQ(r.status, TrainStatus::kComplete);
  ASSERT_EQ(r.curve.size(), 2u);
  EXPECT_EQ(r.curve[0].update, 0);
  EXPECT_EQ(r.curve[1].env_steps, 1024);
  EXPECT_EQ(r.checkpoint.completed_updates, 2);
  EXPECT_EQ(r.checkpoint.optimizer_steps, 2 * 2 * (512 / 64));
  EXPECT_TRUE(r.checkpoint.params.all_finite());
}

TEST(Training, RerunIsIdentical) {
  const HarnessConfig cfg = tiny_config();
  const SceneCatalog cat = tiny_catalog();
  const TrainResult a = train_policy(cat, cfg, nullptr, std::nullopt, {});
  const TrainResult b = train_policy(cat, cfg, nullptr, std::nullopt, {});
  EXPECT_EQ(curve_header() + curve_line(a.curve[0]) + curve_line(a.curve[1]),
            curve_header() + curve_line(b.curve[0]) + curve_line(b.curve[1]));
  EXPECT_EQ(a.checkpoint.params, b.checkpoint.params);
}

TEST(Training, ResumeMatchesUninterruptedRun) {
  HarnessConfig cfg = tiny_config();
  cfg.ppo.total_steps = 1536;
  const SceneCatalog cat = tiny_catalog();
  const TrainResult full = train_policy(cat, cfg, nullptr, std::nullopt, {});
  const TrainResult first = train_policy(cat, cfg, nullptr, 1, {});
  EXPECT_EQ(first.status, TrainStatus::kStopped);
  ASSERT_EQ(first.checkpoint.completed_updates, 1);
  // Resume through the serialized form, as the CLI does.
  const Checkpoint restored = parse_checkpoint(checkpoint_to_json(first.checkpoint));
  const TrainResult rest = train_policy(cat, cfg, &restored, std::nullopt, {});
  EXPECT_EQ(rest.status, TrainStatus::kComplete);
  ASSERT_EQ(rest.curve.size(), 2u);
  EXPECT_EQ(curve_line(rest.curve[0]), curve_line(full.curve[1]));
  EXPECT_EQ(curve_line(rest.curve[1]), curve_line(full.curve[2]));
  EXPECT_EQ(rest.checkpoint.params, full.checkpoint.params);
}

TEST(Training, ResumeRejectsSeedMismatch) {
  const HarnessConfig cfg = tiny_config();
  const TrainResult first = train_policy(tiny_catalog(), cfg, nullptr, 1, {});
  HarnessConfig other = cfg;
  other.training.seed = 6;
  EXPECT_THROW(train_policy(tiny_catalog(), other, &first.checkpoint, std::nullopt, {}), InvalidArgument);
}

TEST(Training, CurveCsvRoundTrip) {
  const TrainResult r = train_policy(tiny_catalog(), tiny_config(), nullptr, std::nullopt, {});
  std::string text = curve_header();
  for (const CurveRow& row : r.curve) text += curve_line(row);
  const std::vector<CurveRow> parsed = parse_curve_csv(text);
  ASSERT_EQ(parsed.size(), r.curve.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) EXPECT_EQ(curve_line(parsed[i]), curve_line(r.curve[i]));
  EXPECT_THROW(parse_curve_csv("nope\n"), ParseError);
}

TEST(Checkpoint, RoundTripAndVersionCheck) {
  const TrainResult r = train_policy(tiny_catalog(), tiny_config(), nullptr, 1, {});
  const Checkpoint& ck = r.checkpoint;
  TempDir dir;
  save_checkpoint(ck, dir / "ck.json");
  const Checkpoint back = load_checkpoint(dir / "ck.json");
  EXPECT_EQ(back.params, ck.params);
  EXPECT_EQ(back.optimizer_m, ck.optimizer_m);
  EXPECT_EQ(back.optimizer_v, ck.optimizer_v);
  EXPECT_EQ(back.reward_var, ck.reward_var);
  EXPECT_EQ(back.env_steps, ck.env_steps);
  EXPECT_EQ(checkpoint_to_json(back), checkpoint_to_json(ck));

  std::string text = checkpoint_to_json(ck);
  const auto pos = text.find("\"version\":1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 11, "\"version\":7");
  EXPECT_THROW(parse_checkpoint(text), VersionError);
  EXPECT_THROW(parse_checkpoint(checkpoint_to_json(ck).substr(0, 100)), ParseError);
}

TEST(Evaluation, CsvAggregatesMatchReport) {
  const HarnessConfig cfg = tiny_config();
  const SceneCatalog cat = tiny_catalog();
  const TrainResult r = train_policy(cat, cfg, nullptr, 1, {});
  const std::vector<Scene> subset = select_test_subset(cat, 6, 2024);
  const EvaluationReport report = evaluate_agents(subset, cfg.env(), 7, &r.checkpoint.params);
  ASSERT_EQ(report.agents.size(), 3u);
  EXPECT_EQ(report.agents[0].agent, "clear");
  EXPECT_EQ(report.agents[1].agent, "random");
  EXPECT_EQ(report.agents[2].agent, "policy");
  EXPECT_EQ(report.episodes.size(), 18u);
  EXPECT_EQ(parse_report_csv(report_to_csv(report)), report);
  EXPECT_EQ(parse_report_json(report_to_json(report)), report);

  double sum_c = 0.0;
  for (std::size_t i = 6; i < 12; ++i) sum_c += report.episodes[i].lambda_c;
  EXPECT_NEAR(report.find("random")->mean_lambda_c, sum_c / 6, 1e-12);
  EXPECT_EQ(report.find("missing"), nullptr);
}

TEST(Evaluation, WithoutPolicyHasTwoAgents) {
  const HarnessConfig cfg = tiny_config();
  const std::vector<Scene> subset = select_test_subset(tiny_catalog(), 4, 1);
  const EvaluationReport report = evaluate_agents(subset, cfg.env(), 7);
  ASSERT_EQ(report.agents.size(), 2u);
  EXPECT_EQ(report.find("policy"), nullptr);
  EXPECT_EQ(report.find("clear")->mean_lambda_c, 0.0);
}

class ConfigFile : public ::testing::Test {
 protected:
  void SetUp() override { unsetenv(kSeedEnvVar); }
  void TearDown() override { unsetenv(kSeedEnvVar); }

  std::filesystem::path write(const std::string& text) {
    const auto p = dir_ / "cfg.json";
    std::ofstream(p) << text;
    return p;
  }
  TempDir dir_;
};

constexpr const char* kMinimal = R"({
  "sim": {}, "perception": {}, "controller": {}, "rulebook": {},
  "ppo": {"seed": 3, "catalog": "cat.json"}, "generator": {}, "eval": {}
})";

TEST_F(ConfigFile, DefaultsAndRelativeCatalog) {
  const HarnessConfig c = load_config(write(kMinimal));
  EXPECT_EQ(c.training.seed, 3u);
  EXPECT_EQ(c.training.catalog, dir_.path() / "cat.json");
  EXPECT_EQ(c.ppo.episode_len, 512);
  EXPECT_FALSE(c.seed_override.has_value());
  EXPECT_EQ(parse_config(config_to_json(c), dir_.path()).training.seed, 3u);
}

TEST_F(ConfigFile, SeedOverrideFromEnvironment) {
  setenv(kSeedEnvVar, "42", 1);
  const HarnessConfig c = load_config(write(kMinimal));
  EXPECT_EQ(c.training.seed, 42u);
  EXPECT_EQ(c.seed_override, std::optional<std::uint64_t>(42));
  setenv(kSeedEnvVar, "4x", 1);
  EXPECT_THROW(load_config(write(kMinimal)), InvalidConfig);
}

TEST_F(ConfigFile, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(parse_config(R"({"sim": {"dtt": 0.1}})"), ParseError);
  EXPECT_THROW(parse_config(R"({"bogus": {}})"), ParseError);
  EXPECT_THROW(parse_config(R"({"ppo": {"gamma": "high"}})"), ParseError);
  EXPECT_THROW(parse_config(R"({"sim": {"frozen_knobs": ["wind"]}})"), ParseError);
  EXPECT_THROW(load_config(write(R"({"ppo": {"clip_ratio": 2.0}})")), InvalidConfig);
  EXPECT_THROW(parse_config("{"), ParseError);
}

TEST_F(ConfigFile, FrozenKnobs) {
  const HarnessConfig c = parse_config(R"({"sim": {"frozen_knobs": ["fog_density", "precipitation"]}})");
  EXPECT_TRUE(c.frozen[0]);
  EXPECT_TRUE(c.frozen[1]);
  EXPECT_FALSE(c.frozen[2]);
  EXPECT_EQ(c.env().frozen, c.frozen);
}

TEST(RunEval, WritesArtifactsAndRejectsMissingInputs) {
  TempDir dir;
  HarnessConfig cfg = tiny_config();
  cfg.eval.subset_size = 4;
  save(tiny_catalog(), dir / "cat.json");
  const EvaluationReport r = run_eval(cfg, EvalRequest{dir / "cat.json", std::nullopt, dir / "out"});
  EXPECT_EQ(r.episodes.size(), 8u);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "report.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "report.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "manifest.json"));
  EXPECT_EQ(parse_report_csv(read_file(dir / "out" / "report.csv")), r);

  EXPECT_THROW(run_eval(cfg, EvalRequest{dir / "cat.json", dir / "absent.json", dir / "o2"}), InvalidArgument);
  cfg.eval.subset_size = 50;
  EXPECT_THROW(run_eval(cfg, EvalRequest{dir / "cat.json", std::nullopt, dir / "o3"}), InvalidArgument);
}

}  // namespace
}  // namespace edgegen
