#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/catalog.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/failure.hpp"
#include "edgegen/perception.hpp"
#include "edgegen/ppo.hpp"
#include "edgegen/rulebook.hpp"
#include "edgegen/world.hpp"

namespace edgegen {

/// Name of the environment variable that overrides ppo.seed.
inline constexpr const char* kSeedEnvVar = "EDGEGEN_SEED";

struct TrainingSetup {
  std::uint64_t seed = 1;
  std::vector<std::size_t> hidden{64, 64};
  std::filesystem::path catalog;  // resolved against the config file's directory
};

struct EvalConfig {
  std::size_t subset_size = 50;
  std::uint64_t subset_seed = 2024;
  std::uint64_t agent_seed = 7;
};

/// The harness configuration file: sections sim, perception, controller, rulebook, ppo, generator, eval.
struct HarnessConfig {
  SimConfig sim;
  KnobMask frozen{};
  PerceptionConfig perception;
  ControllerConfig controller;
  RulebookConfig rulebook;
  PpoConfig ppo;
  TrainingSetup training;
  GeneratorConfig generator;
  EvalConfig eval;
  FailureConfig failure;

  /// Set when EDGEGEN_SEED replaced ppo.seed.
  std::optional<std::uint64_t> seed_override;

  void validate() const;
  /// Environment used for both training and evaluation episodes.
  EnvConfig env() const;
};

/// Parses a config document; relative paths are resolved against `base_dir`.
HarnessConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
/// Reads, parses and validates a config file, then applies the EDGEGEN_SEED override.
HarnessConfig load_config(const std::filesystem::path& path);
/// Canonical JSON echo of every field, for manifests.
std::string config_to_json(const HarnessConfig& cfg);

}  // namespace edgegen
