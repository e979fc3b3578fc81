#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/config.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/failure.hpp"
#include "edgegen/policy.hpp"

namespace edgegen {

inline constexpr int kReportSchemaVersion = 1;

/// One row of the per-episode table.
struct EpisodeSummary {
  std::string agent;
  std::size_t index = 0;  // position in the test subset
  std::string scene_id;
  double lambda_c = 0.0;
  double lambda_p = 0.0;
  double reward_sum = 0.0;
  double deficit_sum = 0.0;
  bool collided = false;
  FailureMode failure = FailureMode::kNone;

  double violation() const { return lambda_c + lambda_p; }
  bool operator==(const EpisodeSummary&) const = default;
};

EpisodeSummary summarize(const EpisodeRecord& rec, std::size_t index);

struct AgentSummary {
  std::string agent;
  std::size_t episodes = 0;
  double mean_lambda_c = 0.0;
  double mean_lambda_p = 0.0;
  double mean_reward = 0.0;
  double deficit_sum = 0.0;
  std::int64_t collisions = 0;
  std::array<std::int64_t, 4> failure_counts{};  // indexed by FailureMode

  double mean_violation() const { return mean_lambda_c + mean_lambda_p; }
  bool operator==(const AgentSummary&) const = default;
};

struct EvaluationReport {
  int schema_version = kReportSchemaVersion;
  std::vector<AgentSummary> agents;
  std::vector<EpisodeSummary> episodes;

  /// nullptr when the agent was not evaluated.
  const AgentSummary* find(std::string_view agent) const;
  bool operator==(const EvaluationReport&) const = default;
};

/// Per-agent aggregates in order of first appearance; sums run in table order.
std::vector<AgentSummary> aggregate(std::span<const EpisodeSummary> episodes);

using EpisodeSink = std::function<void(const EpisodeRecord&, std::size_t index)>;

/**
 * Runs every scene of `subset` once per agent: clear, random, and policy when
 * `policy` is given. The random agent for subset position i draws from
 * RngStream(agent_seed).split(i); the policy acts deterministically.
 */
EvaluationReport evaluate_agents(std::span<const Scene> subset, const EnvConfig& env, std::uint64_t agent_seed,
                                 const PolicyParams* policy = nullptr, const EpisodeSink& sink = {});

std::string report_to_json(const EvaluationReport& report);
std::string report_to_csv(const EvaluationReport& report);
/// One line per agent with the aggregate columns.
std::string summary_to_csv(std::span<const AgentSummary> agents);
/// Parses the per-episode CSV table and recomputes the aggregates from it.
EvaluationReport parse_report_csv(std::string_view text);
EvaluationReport parse_report_json(std::string_view text);

struct EvalRequest {
  std::filesystem::path catalog;
  std::optional<std::filesystem::path> checkpoint;
  std::filesystem::path out_dir;
};

/**
 * The `eval` command: loads the catalog (and checkpoint), selects the fixed
 * subset, evaluates, and writes episodes/<agent>/NNN_<scene>.jsonl,
 * report.json, report.csv and manifest.json under out_dir.
 */
EvaluationReport run_eval(const HarnessConfig& cfg, const EvalRequest& req);

}  // namespace edgegen
