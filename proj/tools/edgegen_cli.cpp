// edgegen: scene generation, training, evaluation and log verification.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "edgegen/catalog.hpp"
#include "edgegen/config.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/errors.hpp"
#include "edgegen/evaluation.hpp"
#include "edgegen/io.hpp"
#include "edgegen/training.hpp"

namespace fs = std::filesystem;
using namespace edgegen;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

int cmd_gen_scenes(std::int64_t count, std::uint64_t seed, const fs::path& out, const std::optional<fs::path>& config) {
  GeneratorConfig gen = config ? load_config(*config).generator : GeneratorConfig{};
  gen.count = count;
  const SceneCatalog catalog = generate(gen, seed);
  save(catalog, out);
  std::cout << "wrote " << catalog.scenes.size() << " scenes to " << out.string() << "\n";
  return kExitOk;
}

int cmd_train(const fs::path& config, const fs::path& out, const std::optional<fs::path>& resume,
              std::optional<std::int64_t> stop_after) {
  const HarnessConfig cfg = load_config(config);
  const TrainResult r = run_train(cfg, TrainRequest{out, resume, stop_after});
  std::cout << "training " << to_string(r.status) << ": " << r.checkpoint.completed_updates << "/"
            << cfg.ppo.update_count() << " updates, " << r.checkpoint.env_steps << " env steps\n";
  if (r.status == TrainStatus::kFailed) {
    std::cerr << "error: " << r.diagnostic << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

int cmd_eval(const fs::path& config, const fs::path& catalog, const std::optional<fs::path>& checkpoint,
             const fs::path& out) {
  const HarnessConfig cfg = load_config(config);
  const EvaluationReport report = run_eval(cfg, EvalRequest{catalog, checkpoint, out});
  std::cout << summary_to_csv(report.agents);
  return kExitOk;
}

int cmd_replay(const fs::path& episode) {
  const EpisodeLog log = parse_episode_jsonl(read_file(episode));
  const ReplayCheck check = verify_episode(log);
  if (check.ok) {
    std::cout << "ok: " << log.record.scene_id << " (" << log.record.agent << "), " << log.record.rows.size()
              << " rows, lambda_c=" << format_double(check.recomputed.lambda_c)
              << " lambda_p=" << format_double(check.recomputed.lambda_p)
              << " failure=" << to_string(check.recomputed_failure) << "\n";
    return kExitOk;
  }
  std::cout << "MISMATCH: " << episode.string() << "\n";
  for (const std::string& m : check.mismatches) std::cout << "  " << m << "\n";
  return kExitRuntime;
}

int cmd_report(const fs::path& in, const std::string& format) {
  const EvaluationReport from_csv = parse_report_csv(read_file(in / "report.csv"));
  if (fs::exists(in / "report.json")) {
    const EvaluationReport stored = parse_report_json(read_file(in / "report.json"));
    if (stored.agents != from_csv.agents || stored.episodes != from_csv.episodes) {
      std::cerr << "error: report.json aggregates differ from the per-episode table in report.csv\n";
      return kExitRuntime;
    }
  }
  std::cout << (format == "json" ? report_to_json(from_csv) : summary_to_csv(from_csv.agents));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weather edge-case generator for a perception-driven car-following controller", "edgegen"};
  app.require_subcommand(1);

  std::int64_t count = 0;
  std::uint64_t seed = 0;
  fs::path out;
  fs::path config;
  std::optional<fs::path> gen_config;
  auto* gen = app.add_subcommand("gen-scenes", "Generate a scene catalog");
  gen->add_option("--count", count, "Number of scenes")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "Generator seed")->required();
  gen->add_option("--out", out, "Output catalog file")->required();
  gen->add_option("--config", gen_config, "Config file whose generator section supplies the ranges")
      ->check(CLI::ExistingFile);

  std::optional<fs::path> resume;
  std::optional<std::int64_t> stop_after;
  auto* train = app.add_subcommand("train", "Train the edge-case policy");
  train->add_option("--config", config, "Harness config file")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--resume", resume, "Checkpoint to resume from");
  train->add_option("--stop-after", stop_after, "Stop after this many updates")->check(CLI::PositiveNumber);

  fs::path catalog;
  std::optional<fs::path> checkpoint;
  auto* eval = app.add_subcommand("eval", "Evaluate clear, random and (optionally) policy agents");
  eval->add_option("--config", config, "Harness config file")->required()->check(CLI::ExistingFile);
  eval->add_option("--catalog", catalog, "Scene catalog")->required();
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint");
  eval->add_option("--out", out, "Output directory")->required();

  fs::path episode;
  auto* replay = app.add_subcommand("replay", "Re-verify an episode log from its rows");
  replay->add_option("--episode", episode, "Episode JSONL file")->required();

  fs::path in;
  std::string format = "csv";
  auto* report = app.add_subcommand("report", "Summarize an evaluation directory");
  report->add_option("--in", in, "Evaluation output directory")->required();
  report->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_scenes(count, seed, out, gen_config);
    if (*train) return cmd_train(config, out, resume, stop_after);
    if (*eval) return cmd_eval(config, catalog, checkpoint, out);
    if (*replay) return cmd_replay(episode);
    if (*report) return cmd_report(in, format);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
