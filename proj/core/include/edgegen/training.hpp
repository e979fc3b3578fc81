#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/catalog.hpp"
#include "edgegen/checkpoint.hpp"
#include "edgegen/config.hpp"

namespace edgegen {

/// One row of the training curve.
struct CurveRow {
  std::int64_t update = 0;  // 0-based update index
  std::int64_t env_steps = 0;
  double mean_reward = 0.0;
  double mean_lambda_c = 0.0;
  double mean_lambda_p = 0.0;
  double surrogate = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double approx_kl = 0.0;
  double clip_fraction = 0.0;

  bool operator==(const CurveRow&) const = default;
};

std::string curve_header();
std::string curve_line(const CurveRow& row);
std::vector<CurveRow> parse_curve_csv(std::string_view text);

enum class TrainStatus { kComplete, kStopped, kFailed };
std::string_view to_string(TrainStatus s);

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<CurveRow> curve;  // rows produced by this call only
  TrainStatus status = TrainStatus::kComplete;
  std::string diagnostic;
};

/// Called after every completed update with the new curve row and checkpoint.
using UpdateHook = std::function<void(const CurveRow&, const Checkpoint&)>;

/**
 * PPO training over `catalog`. Update u collects episodes_per_update
 * episodes; episode e of update u draws its scene and its action noise from
 * RngStream(seed).split(u).split(e), so a resumed run reproduces an
 * uninterrupted one exactly. Stops after `stop_after` updates when given.
 */
TrainResult train_policy(const SceneCatalog& catalog, const HarnessConfig& cfg, const Checkpoint* resume = nullptr,
                         std::optional<std::int64_t> stop_after = std::nullopt, const UpdateHook& hook = {});

struct TrainRequest {
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> resume;
  std::optional<std::int64_t> stop_after;
};

/**
 * The `train` command: writes checkpoint.json and training_curve.csv after
 * every update and manifest.json at the end. A non-finite update halts the
 * run, keeps the artifacts of the last good update, and records the failure
 * in the manifest.
 */
TrainResult run_train(const HarnessConfig& cfg, const TrainRequest& req);

}  // namespace edgegen
