#include "edgegen/catalog.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>
#include <unordered_set>

#include "edgegen/errors.hpp"
#include "edgegen/io.hpp"
#include "edgegen/rng.hpp"
#include "json_util.hpp"

namespace edgegen {

using detail::Json;

namespace {

void check_range(const Range& r, std::string_view name) {
  if (!(r.lo >= 0.0 && r.hi >= r.lo)) {
    throw InvalidConfig("generator." + std::string(name) + " must be ordered and non-negative");
  }
}

void check_range(const TickRange& r, std::string_view name) {
  if (!(r.lo >= 0 && r.hi >= r.lo)) {
    throw InvalidConfig("generator." + std::string(name) + " must be ordered and non-negative");
  }
}

std::string scene_name(std::size_t index) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "scene-%05zu", index);
  return buf.data();
}

Scene draw_scene(const GeneratorConfig& cfg, std::uint64_t seed, std::size_t index) {
  RngStream rng = RngStream(seed).split(index);
  Scene s;
  s.scene_id = scene_name(index);
  s.initial_gap = rng.uniform(cfg.gap_range.lo, cfg.gap_range.hi);
  s.ego_speed0 = rng.uniform(cfg.ego_speed_range.lo, cfg.ego_speed_range.hi);
  s.lead_speed0 = rng.uniform(cfg.lead_speed_range.lo, cfg.lead_speed_range.hi);

  // Events are confined to equal slots of the event window, which keeps them
  // sorted and disjoint by construction.
  const std::int64_t n_events = rng.integer(cfg.brake_event_count_range.lo, cfg.brake_event_count_range.hi);
  if (n_events > 0) {
    const std::int64_t window = cfg.event_tick_range.hi - cfg.event_tick_range.lo + 1;
    const std::int64_t slot = std::max<std::int64_t>(window / n_events, 2);
    for (std::int64_t k = 0; k < n_events; ++k) {
      const std::int64_t slot_lo = cfg.event_tick_range.lo + k * slot;
      const std::int64_t slot_hi = slot_lo + slot;  // exclusive
      LeadEvent e;
      e.start_tick = rng.integer(slot_lo, slot_lo + (slot - 1) / 2);
      const std::int64_t duration = rng.integer(cfg.event_duration_range.lo, cfg.event_duration_range.hi);
      e.duration_ticks = std::clamp<std::int64_t>(duration, 1, slot_hi - e.start_tick);
      e.target_speed = rng.uniform(cfg.brake_target_range.lo, cfg.brake_target_range.hi);
      s.lead_events.push_back(e);
    }
  }

  if (rng.bernoulli(cfg.cut_in_probability)) {
    CutIn c;
    c.trigger_tick = rng.integer(cfg.cut_in_tick_range.lo, cfg.cut_in_tick_range.hi);
    c.inserted_gap = rng.uniform(cfg.cut_in_gap_range.lo, cfg.cut_in_gap_range.hi);
    c.inserted_speed = rng.uniform(cfg.cut_in_speed_range.lo, cfg.cut_in_speed_range.hi);
    s.cut_in = c;
  }
  s.noise_seed = derive_seed(seed, index);
  return s;
}

Json scene_to_json(const Scene& s) {
  Json events = Json::array();
  for (const LeadEvent& e : s.lead_events) {
    events.push_back({{"start_tick", e.start_tick}, {"duration_ticks", e.duration_ticks}, {"target_speed", e.target_speed}});
  }
  Json cut_in = nullptr;
  if (s.cut_in) {
    cut_in = {{"trigger_tick", s.cut_in->trigger_tick},
              {"inserted_gap", s.cut_in->inserted_gap},
              {"inserted_speed", s.cut_in->inserted_speed}};
  }
  return {{"scene_id", s.scene_id},       {"initial_gap", s.initial_gap}, {"ego_speed0", s.ego_speed0},
          {"lead_speed0", s.lead_speed0}, {"lead_events", events},        {"cut_in", cut_in},
          {"noise_seed", s.noise_seed}};
}

Scene scene_from_json(const Json& j, const std::string& where) {
  detail::require_keys(j, {"scene_id", "initial_gap", "ego_speed0", "lead_speed0", "lead_events", "cut_in", "noise_seed"},
                       where);
  Scene s;
  s.scene_id = detail::get_string(j, "scene_id", where);
  s.initial_gap = detail::get_number(j, "initial_gap", where);
  s.ego_speed0 = detail::get_number(j, "ego_speed0", where);
  s.lead_speed0 = detail::get_number(j, "lead_speed0", where);
  s.noise_seed = detail::get_uint(j, "noise_seed", where);
  const Json& events = detail::require(j, "lead_events", where);
  if (!events.is_array()) throw ParseError(where + ".lead_events: expected an array");
  for (std::size_t k = 0; k < events.size(); ++k) {
    const std::string ew = where + ".lead_events[" + std::to_string(k) + "]";
    detail::require_keys(events[k], {"start_tick", "duration_ticks", "target_speed"}, ew);
    s.lead_events.push_back({detail::get_int(events[k], "start_tick", ew),
                             detail::get_int(events[k], "duration_ticks", ew),
                             detail::get_number(events[k], "target_speed", ew)});
  }
  if (j.contains("cut_in") && !j["cut_in"].is_null()) {
    const Json& c = j["cut_in"];
    const std::string cw = where + ".cut_in";
    detail::require_keys(c, {"trigger_tick", "inserted_gap", "inserted_speed"}, cw);
    s.cut_in = CutIn{detail::get_int(c, "trigger_tick", cw), detail::get_number(c, "inserted_gap", cw),
                     detail::get_number(c, "inserted_speed", cw)};
  }
  return s;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (count <= 0) throw InvalidConfig("generator.count must be > 0");
  check_range(gap_range, "gap_range");
  check_range(ego_speed_range, "ego_speed_range");
  check_range(lead_speed_range, "lead_speed_range");
  check_range(brake_event_count_range, "brake_event_count_range");
  check_range(brake_target_range, "brake_target_range");
  check_range(event_tick_range, "event_tick_range");
  check_range(event_duration_range, "event_duration_range");
  check_range(cut_in_tick_range, "cut_in_tick_range");
  check_range(cut_in_gap_range, "cut_in_gap_range");
  check_range(cut_in_speed_range, "cut_in_speed_range");
  if (!(cut_in_probability >= 0.0 && cut_in_probability <= 1.0)) {
    throw InvalidConfig("generator.cut_in_probability must be in [0, 1]");
  }
  if (event_duration_range.lo < 1) throw InvalidConfig("generator.event_duration_range must start at >= 1");
  if (cut_in_tick_range.lo < 1) throw InvalidConfig("generator.cut_in_tick_range must start at >= 1");
  if (cut_in_gap_range.lo <= 0.0) throw InvalidConfig("generator.cut_in_gap_range must be > 0");
}

SceneCatalog generate(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  SceneCatalog c;
  c.generator_seed = seed;
  c.scenes.reserve(static_cast<std::size_t>(cfg.count));
  for (std::int64_t i = 0; i < cfg.count; ++i) c.scenes.push_back(draw_scene(cfg, seed, static_cast<std::size_t>(i)));
  return c;
}

std::string to_json(const SceneCatalog& catalog) {
  Json scenes = Json::array();
  for (const Scene& s : catalog.scenes) scenes.push_back(scene_to_json(s));
  const Json doc = {{"schema_version", catalog.schema_version},
                    {"generator_seed", catalog.generator_seed},
                    {"scenes", scenes}};
  return doc.dump(1) + "\n";
}

SceneCatalog parse_catalog(std::string_view text) {
  const Json doc = detail::parse_json(text, "scene catalog");
  if (!doc.is_object()) throw ParseError("scene catalog: top level must be an object");
  const std::int64_t version = detail::get_int(doc, "schema_version", "catalog");
  if (version != kCatalogSchemaVersion) {
    throw VersionError("scene catalog: unsupported schema_version " + std::to_string(version) + " (this build reads " +
                       std::to_string(kCatalogSchemaVersion) + ")");
  }
  detail::require_keys(doc, {"schema_version", "generator_seed", "scenes"}, "catalog");

  SceneCatalog c;
  c.schema_version = static_cast<int>(version);
  c.generator_seed = detail::get_uint(doc, "generator_seed", "catalog");
  const Json& scenes = detail::require(doc, "scenes", "catalog");
  if (!scenes.is_array()) throw ParseError("catalog.scenes: expected an array");
  if (scenes.empty()) throw ParseError("catalog.scenes: must not be empty");

  const SimConfig sim;
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    Scene s = scene_from_json(scenes[i], "catalog.scenes[" + std::to_string(i) + "]");
    try {
      validate_scene(s, sim);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("catalog: ") + e.what());
    }
    if (!ids.insert(s.scene_id).second) throw ParseError("catalog: duplicate scene_id '" + s.scene_id + "'");
    c.scenes.push_back(std::move(s));
  }
  return c;
}

void save(const SceneCatalog& catalog, const std::filesystem::path& path) { write_file_atomic(path, to_json(catalog)); }

SceneCatalog load(const std::filesystem::path& path) { return parse_catalog(read_file(path)); }

std::vector<Scene> select_test_subset(const SceneCatalog& catalog, std::size_t n, std::uint64_t seed) {
  const std::size_t size = catalog.scenes.size();
  if (n > size) {
    throw InvalidArgument("cannot select " + std::to_string(n) + " scenes from a catalog of " + std::to_string(size));
  }
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  RngStream rng(seed);
  std::vector<Scene> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pick = k + static_cast<std::size_t>(rng.below(size - k));
    std::swap(idx[k], idx[pick]);
    out.push_back(catalog.scenes[idx[k]]);
  }
  return out;
}

}  // namespace edgegen
