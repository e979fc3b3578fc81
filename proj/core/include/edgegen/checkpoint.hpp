#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/policy.hpp"
#include "edgegen/ppo.hpp"

namespace edgegen {

inline constexpr int kCheckpointVersion = 1;

/// Everything needed to resume training or to evaluate a policy.
struct Checkpoint {
  PolicyParams params;
  std::int64_t completed_updates = 0;
  std::int64_t env_steps = 0;
  std::uint64_t seed = 0;
  PpoConfig ppo;
  std::int64_t optimizer_steps = 0;
  std::vector<double> optimizer_m;
  std::vector<double> optimizer_v;
  // Running return statistics of the reward scaler.
  double reward_count = 1e-4;
  double reward_mean = 0.0;
  double reward_var = 1.0;
};

/// JSON document: layer shapes + flat coefficient arrays + PpoConfig echo + optimizer moments.
std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace edgegen
