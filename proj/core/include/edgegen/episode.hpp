#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/agents.hpp"
#include "edgegen/failure.hpp"
#include "edgegen/knobs.hpp"
#include "edgegen/perception.hpp"
#include "edgegen/ppo.hpp"
#include "edgegen/rulebook.hpp"
#include "edgegen/world.hpp"

namespace edgegen {

/// Everything the environment side of the loop needs.
struct EnvConfig {
  SimConfig sim;
  PerceptionConfig perception;
  ControllerConfig controller;
  RulebookConfig rulebook;
  FailureConfig failure;
  KnobMask frozen{};
  KnobState initial_knobs = KnobState::clear();
  std::int64_t episode_len = 512;

  void validate() const;
};

/// One logged tick, taken after the world step.
struct EpisodeRow {
  std::int64_t tick = 0;
  KnobVector knobs{};
  double gap = 0.0;
  double ego_speed = 0.0;
  double lead_speed = 0.0;
  double visibility = 0.0;
  bool detected = false;
  double iou = 0.0;
  bool collided = false;
  double alpha_c = 0.0;
  double alpha_p = 0.0;
  double reward = 0.0;

  bool operator==(const EpisodeRow&) const = default;
};

struct EpisodeTotals {
  double lambda_c = 0.0;
  double lambda_p = 0.0;
  double reward = 0.0;
  double deficit = 0.0;

  bool operator==(const EpisodeTotals&) const = default;
};

struct EpisodeRecord {
  std::string scene_id;
  std::string agent;
  std::vector<EpisodeRow> rows;
  EpisodeTotals totals;
  FailureMode failure = FailureMode::kNone;
  bool aborted = false;
  std::string diagnostic;

  bool collided() const { return !rows.empty() && rows.back().collided; }
  bool operator==(const EpisodeRecord&) const = default;
};

/**
 * Runs one fixed-length episode from the clear preset. Per tick:
 * featurize -> agent action -> knob update -> world step -> sense ->
 * control -> rule terms -> reward. Control computed on tick t is applied on
 * step t+1. When `sink` is given every transition is appended to it.
 * A non-finite value ends the episode early with `aborted` set.
 */
EpisodeRecord run_episode(Agent& agent, const Scene& scene, const EnvConfig& env, RunMode mode,
                          RolloutBuffer* sink = nullptr);

Realization realization_of(std::span<const EpisodeRow> rows);
std::vector<TickObservation> observations_of(std::span<const EpisodeRow> rows);
/// Totals recomputed from the rows alone.
EpisodeTotals recompute_totals(std::span<const EpisodeRow> rows, const RulebookConfig& rules);

/**
 * JSON Lines: a header line (scene, agent, rule parameters), one line per
 * row, then a summary line with totals and the failure label. The header
 * makes a log self-contained for replay.
 */
std::string episode_to_jsonl(const EpisodeRecord& rec, const EnvConfig& env);

struct EpisodeLog {
  EpisodeRecord record;
  RulebookConfig rules;
  FailureConfig failure;
  std::int64_t episode_len = 0;
};

/// Throws ParseError (with line number) on malformed or incomplete logs.
EpisodeLog parse_episode_jsonl(std::string_view text);

struct ReplayCheck {
  bool ok = true;
  std::vector<std::string> mismatches;
  EpisodeTotals recomputed;
  FailureMode recomputed_failure = FailureMode::kNone;
};

/// Re-derives totals and the failure label from the rows and compares to the stored ones (tolerance 1e-9).
ReplayCheck verify_episode(const EpisodeLog& log);

}  // namespace edgegen
