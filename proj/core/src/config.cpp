#include "edgegen/config.hpp"

#include <cstdlib>
#include <string>

#include "edgegen/errors.hpp"
#include "edgegen/io.hpp"
#include "json_util.hpp"

namespace edgegen {

using detail::Json;
using detail::read_opt;
using OrderedJson = nlohmann::ordered_json;

namespace {

void read_range(const Json& obj, std::string_view key, Range& out, std::string_view where) {
  if (!obj.contains(std::string(key))) return;
  const Json& v = obj[std::string(key)];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(std::string(where) + "." + std::string(key) + ": expected [lo, hi]");
  }
  out = {v[0].get<double>(), v[1].get<double>()};
}

void read_range(const Json& obj, std::string_view key, TickRange& out, std::string_view where) {
  if (!obj.contains(std::string(key))) return;
  const Json& v = obj[std::string(key)];
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer()) {
    throw ParseError(std::string(where) + "." + std::string(key) + ": expected [lo, hi] integers");
  }
  out = {v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
}

const Json* section(const Json& doc, std::string_view name) {
  const auto it = doc.find(std::string(name));
  return it == doc.end() ? nullptr : &*it;
}

void parse_sim(const Json& j, HarnessConfig& c) {
  constexpr std::string_view w = "sim";
  detail::require_keys(j, {"dt", "accel_max", "decel_max", "speed_cap", "vehicle_length", "lead_accel_max", "frozen_knobs"},
                       w);
  read_opt(j, "dt", c.sim.dt, w);
  read_opt(j, "accel_max", c.sim.accel_max, w);
  read_opt(j, "decel_max", c.sim.decel_max, w);
  read_opt(j, "speed_cap", c.sim.speed_cap, w);
  read_opt(j, "vehicle_length", c.sim.vehicle_length, w);
  read_opt(j, "lead_accel_max", c.sim.lead_accel_max, w);
  if (j.contains("frozen_knobs")) {
    const Json& f = j["frozen_knobs"];
    if (!f.is_array()) throw ParseError("sim.frozen_knobs: expected an array of knob names");
    for (const Json& name : f) {
      if (!name.is_string()) throw ParseError("sim.frozen_knobs: expected knob names");
      try {
        c.frozen[static_cast<std::size_t>(knob_from_name(name.get<std::string>()))] = true;
      } catch (const InvalidArgument& e) {
        throw ParseError(std::string("sim.frozen_knobs: ") + e.what());
      }
    }
  }
}

void parse_perception(const Json& j, PerceptionConfig& p) {
  constexpr std::string_view w = "perception";
  detail::require_keys(j, {"r_max", "fog_coeff", "rain_coeff", "deposit_coeff", "night_floor", "glare_factor",
                           "glare_alt_max", "glare_az_halfwidth", "range_noise_coeff"},
                       w);
  read_opt(j, "r_max", p.r_max, w);
  read_opt(j, "fog_coeff", p.fog_coeff, w);
  read_opt(j, "rain_coeff", p.rain_coeff, w);
  read_opt(j, "deposit_coeff", p.deposit_coeff, w);
  read_opt(j, "night_floor", p.night_floor, w);
  read_opt(j, "glare_factor", p.glare_factor, w);
  read_opt(j, "glare_alt_max", p.glare_alt_max, w);
  read_opt(j, "glare_az_halfwidth", p.glare_az_halfwidth, w);
  read_opt(j, "range_noise_coeff", p.range_noise_coeff, w);
}

void parse_controller(const Json& j, ControllerConfig& c) {
  constexpr std::string_view w = "controller";
  detail::require_keys(j, {"v_cruise", "k_v", "d_standoff", "a_comfort", "epsilon"}, w);
  read_opt(j, "v_cruise", c.v_cruise, w);
  read_opt(j, "k_v", c.k_v, w);
  read_opt(j, "d_standoff", c.d_standoff, w);
  read_opt(j, "a_comfort", c.a_comfort, w);
  read_opt(j, "epsilon", c.epsilon, w);
}

void parse_rulebook(const Json& j, RulebookConfig& r) {
  constexpr std::string_view w = "rulebook";
  detail::require_keys(j, {"w_c", "w_p", "proximity_threshold", "rss_decel"}, w);
  read_opt(j, "w_c", r.weights.w_c, w);
  read_opt(j, "w_p", r.weights.w_p, w);
  read_opt(j, "proximity_threshold", r.proximity_threshold, w);
  read_opt(j, "rss_decel", r.rss_decel, w);
}

void parse_ppo(const Json& j, HarnessConfig& c, const std::filesystem::path& base_dir) {
  constexpr std::string_view w = "ppo";
  detail::require_keys(j, {"gamma", "gae_lambda", "clip_ratio", "learn_rate", "epochs_per_update", "minibatch_size",
                           "value_coeff", "entropy_coeff", "max_grad_norm", "normalize_rewards", "episode_len",
                           "episodes_per_update",
                           "total_steps", "seed", "hidden", "catalog"},
                       w);
  PpoConfig& p = c.ppo;
  read_opt(j, "gamma", p.gamma, w);
  read_opt(j, "gae_lambda", p.gae_lambda, w);
  read_opt(j, "clip_ratio", p.clip_ratio, w);
  read_opt(j, "learn_rate", p.learn_rate, w);
  read_opt(j, "epochs_per_update", p.epochs_per_update, w);
  read_opt(j, "minibatch_size", p.minibatch_size, w);
  read_opt(j, "value_coeff", p.value_coeff, w);
  read_opt(j, "entropy_coeff", p.entropy_coeff, w);
  read_opt(j, "max_grad_norm", p.max_grad_norm, w);
  if (j.contains("normalize_rewards")) p.normalize_rewards = detail::get_bool(j, "normalize_rewards", w);
  read_opt(j, "episode_len", p.episode_len, w);
  read_opt(j, "episodes_per_update", p.episodes_per_update, w);
  read_opt(j, "total_steps", p.total_steps, w);
  read_opt(j, "seed", c.training.seed, w);
  if (j.contains("hidden")) {
    const Json& h = j["hidden"];
    if (!h.is_array() || h.empty()) throw ParseError("ppo.hidden: expected a non-empty array of widths");
    c.training.hidden.clear();
    for (const Json& v : h) {
      if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0) throw ParseError("ppo.hidden: widths must be > 0");
      c.training.hidden.push_back(v.get<std::size_t>());
    }
  }
  if (j.contains("catalog")) {
    std::filesystem::path p_cat = detail::get_string(j, "catalog", w);
    c.training.catalog = p_cat.is_relative() && !base_dir.empty() ? base_dir / p_cat : p_cat;
  }
}

void parse_generator(const Json& j, GeneratorConfig& g) {
  constexpr std::string_view w = "generator";
  detail::require_keys(j, {"count", "gap_range", "ego_speed_range", "lead_speed_range", "brake_event_count_range",
                           "brake_target_range", "cut_in_probability", "event_tick_range", "event_duration_range",
                           "cut_in_tick_range", "cut_in_gap_range", "cut_in_speed_range"},
                       w);
  read_opt(j, "count", g.count, w);
  read_range(j, "gap_range", g.gap_range, w);
  read_range(j, "ego_speed_range", g.ego_speed_range, w);
  read_range(j, "lead_speed_range", g.lead_speed_range, w);
  read_range(j, "brake_event_count_range", g.brake_event_count_range, w);
  read_range(j, "brake_target_range", g.brake_target_range, w);
  read_opt(j, "cut_in_probability", g.cut_in_probability, w);
  read_range(j, "event_tick_range", g.event_tick_range, w);
  read_range(j, "event_duration_range", g.event_duration_range, w);
  read_range(j, "cut_in_tick_range", g.cut_in_tick_range, w);
  read_range(j, "cut_in_gap_range", g.cut_in_gap_range, w);
  read_range(j, "cut_in_speed_range", g.cut_in_speed_range, w);
}

void parse_eval(const Json& j, HarnessConfig& c) {
  constexpr std::string_view w = "eval";
  detail::require_keys(j, {"subset_size", "subset_seed", "agent_seed", "failure_window_ticks", "failure_dropout_ticks",
                           "failure_decel"},
                       w);
  std::int64_t subset = static_cast<std::int64_t>(c.eval.subset_size);
  read_opt(j, "subset_size", subset, w);
  if (subset <= 0) throw ParseError("eval.subset_size must be > 0");
  c.eval.subset_size = static_cast<std::size_t>(subset);
  read_opt(j, "subset_seed", c.eval.subset_seed, w);
  read_opt(j, "agent_seed", c.eval.agent_seed, w);
  read_opt(j, "failure_window_ticks", c.failure.window_ticks, w);
  read_opt(j, "failure_dropout_ticks", c.failure.dropout_ticks, w);
  read_opt(j, "failure_decel", c.failure.decel, w);
}

OrderedJson range_json(const Range& r) { return OrderedJson::array({r.lo, r.hi}); }
OrderedJson range_json(const TickRange& r) { return OrderedJson::array({r.lo, r.hi}); }

}  // namespace

void HarnessConfig::validate() const {
  env().validate();
  ppo.validate();
  generator.validate();
  if (training.hidden.empty()) throw InvalidConfig("ppo.hidden must not be empty");
  if (eval.subset_size == 0) throw InvalidConfig("eval.subset_size must be > 0");
}

EnvConfig HarnessConfig::env() const {
  EnvConfig e;
  e.sim = sim;
  e.perception = perception;
  e.controller = controller;
  e.rulebook = rulebook;
  e.failure = failure;
  e.frozen = frozen;
  e.episode_len = ppo.episode_len;
  return e;
}

HarnessConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  const Json doc = detail::parse_json(text, "config");
  detail::require_keys(doc, {"sim", "perception", "controller", "rulebook", "ppo", "generator", "eval"}, "config");
  HarnessConfig c;
  if (const Json* s = section(doc, "sim")) parse_sim(*s, c);
  if (const Json* s = section(doc, "perception")) parse_perception(*s, c.perception);
  if (const Json* s = section(doc, "controller")) parse_controller(*s, c.controller);
  if (const Json* s = section(doc, "rulebook")) parse_rulebook(*s, c.rulebook);
  if (const Json* s = section(doc, "ppo")) parse_ppo(*s, c, base_dir);
  if (const Json* s = section(doc, "generator")) parse_generator(*s, c.generator);
  if (const Json* s = section(doc, "eval")) parse_eval(*s, c);
  return c;
}

HarnessConfig load_config(const std::filesystem::path& path) {
  HarnessConfig c = parse_config(read_file(path), path.parent_path());
  if (const char* env = std::getenv(kSeedEnvVar); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw InvalidConfig(std::string(kSeedEnvVar) + " must be a decimal integer");
    c.training.seed = v;
    c.seed_override = v;
  }
  c.validate();
  return c;
}

std::string config_to_json(const HarnessConfig& c) {
  OrderedJson frozen = OrderedJson::array();
  for (std::size_t i = 0; i < kKnobCount; ++i) {
    if (c.frozen[i]) frozen.push_back(std::string(knob_name(static_cast<Knob>(i))));
  }
  const OrderedJson doc = {
      {"sim",
       {{"dt", c.sim.dt},
        {"accel_max", c.sim.accel_max},
        {"decel_max", c.sim.decel_max},
        {"speed_cap", c.sim.speed_cap},
        {"vehicle_length", c.sim.vehicle_length},
        {"lead_accel_max", c.sim.lead_accel_max},
        {"frozen_knobs", frozen}}},
      {"perception",
       {{"r_max", c.perception.r_max},
        {"fog_coeff", c.perception.fog_coeff},
        {"rain_coeff", c.perception.rain_coeff},
        {"deposit_coeff", c.perception.deposit_coeff},
        {"night_floor", c.perception.night_floor},
        {"glare_factor", c.perception.glare_factor},
        {"glare_alt_max", c.perception.glare_alt_max},
        {"glare_az_halfwidth", c.perception.glare_az_halfwidth},
        {"range_noise_coeff", c.perception.range_noise_coeff}}},
      {"controller",
       {{"v_cruise", c.controller.v_cruise},
        {"k_v", c.controller.k_v},
        {"d_standoff", c.controller.d_standoff},
        {"a_comfort", c.controller.a_comfort},
        {"epsilon", c.controller.epsilon}}},
      {"rulebook",
       {{"w_c", c.rulebook.weights.w_c},
        {"w_p", c.rulebook.weights.w_p},
        {"proximity_threshold", c.rulebook.proximity_threshold},
        {"rss_decel", c.rulebook.rss_decel}}},
      {"ppo",
       {{"gamma", c.ppo.gamma},
        {"gae_lambda", c.ppo.gae_lambda},
        {"clip_ratio", c.ppo.clip_ratio},
        {"learn_rate", c.ppo.learn_rate},
        {"epochs_per_update", c.ppo.epochs_per_update},
        {"minibatch_size", c.ppo.minibatch_size},
        {"value_coeff", c.ppo.value_coeff},
        {"entropy_coeff", c.ppo.entropy_coeff},
        {"max_grad_norm", c.ppo.max_grad_norm},
        {"normalize_rewards", c.ppo.normalize_rewards},
        {"episode_len", c.ppo.episode_len},
        {"episodes_per_update", c.ppo.episodes_per_update},
        {"total_steps", c.ppo.total_steps},
        {"seed", c.training.seed},
        {"hidden", c.training.hidden},
        {"catalog", c.training.catalog.string()}}},
      {"generator",
       {{"count", c.generator.count},
        {"gap_range", range_json(c.generator.gap_range)},
        {"ego_speed_range", range_json(c.generator.ego_speed_range)},
        {"lead_speed_range", range_json(c.generator.lead_speed_range)},
        {"brake_event_count_range", range_json(c.generator.brake_event_count_range)},
        {"brake_target_range", range_json(c.generator.brake_target_range)},
        {"cut_in_probability", c.generator.cut_in_probability},
        {"event_tick_range", range_json(c.generator.event_tick_range)},
        {"event_duration_range", range_json(c.generator.event_duration_range)},
        {"cut_in_tick_range", range_json(c.generator.cut_in_tick_range)},
        {"cut_in_gap_range", range_json(c.generator.cut_in_gap_range)},
        {"cut_in_speed_range", range_json(c.generator.cut_in_speed_range)}}},
      {"eval",
       {{"subset_size", c.eval.subset_size},
        {"subset_seed", c.eval.subset_seed},
        {"agent_seed", c.eval.agent_seed},
        {"failure_window_ticks", c.failure.window_ticks},
        {"failure_dropout_ticks", c.failure.dropout_ticks},
        {"failure_decel", c.failure.decel}}},
  };
  return doc.dump(2);
}

}  // namespace edgegen
