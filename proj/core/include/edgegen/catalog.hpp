#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "edgegen/world.hpp"

namespace edgegen {

inline constexpr int kCatalogSchemaVersion = 1;

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct TickRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
};

/// Distribution the initial scenes are drawn from.
struct GeneratorConfig {
  std::int64_t count = 1200;
  Range gap_range{15.0, 60.0};
  Range ego_speed_range{8.0, 15.0};
  Range lead_speed_range{6.0, 14.0};
  TickRange brake_event_count_range{1, 3};
  Range brake_target_range{0.0, 8.0};
  double cut_in_probability = 0.3;
  TickRange event_tick_range{20, 240};
  TickRange event_duration_range{20, 60};
  TickRange cut_in_tick_range{30, 200};
  Range cut_in_gap_range{15.0, 30.0};
  Range cut_in_speed_range{6.0, 14.0};

  void validate() const;
};

struct SceneCatalog {
  int schema_version = kCatalogSchemaVersion;
  std::uint64_t generator_seed = 0;
  std::vector<Scene> scenes;

  bool operator==(const SceneCatalog&) const = default;
};

/**
 * Draws cfg.count scenes. Scene i uses its own child stream of `seed`, and its
 * noise_seed is derive_seed(seed, i), so a scene's content and its perception
 * noise do not depend on how many other scenes were generated.
 */
SceneCatalog generate(const GeneratorConfig& cfg, std::uint64_t seed);

std::string to_json(const SceneCatalog& catalog);
/// Strict parse: unknown fields, wrong types and unsupported versions are errors.
SceneCatalog parse_catalog(std::string_view text);

void save(const SceneCatalog& catalog, const std::filesystem::path& path);
SceneCatalog load(const std::filesystem::path& path);

/// n distinct scenes by seeded partial Fisher-Yates; order is part of the result.
std::vector<Scene> select_test_subset(const SceneCatalog& catalog, std::size_t n, std::uint64_t seed);

}  // namespace edgegen
