#include "edgegen/episode.hpp"

#include <cmath>
#include <sstream>

#include "edgegen/errors.hpp"
#include "edgegen/features.hpp"
#include "edgegen/io.hpp"
#include "json_util.hpp"

namespace edgegen {

using detail::Json;
using OrderedJson = nlohmann::ordered_json;

void EnvConfig::validate() const {
  sim.validate();
  perception.validate();
  controller.validate();
  rulebook.validate();
  failure.validate();
  if (episode_len <= 0) throw InvalidConfig("episode_len must be > 0");
  if (!in_range(initial_knobs)) throw InvalidConfig("initial knob state out of range");
}

namespace {

bool finite_row(const EpisodeRow& r) {
  for (double k : r.knobs) {
    if (!std::isfinite(k)) return false;
  }
  return std::isfinite(r.gap) && std::isfinite(r.ego_speed) && std::isfinite(r.lead_speed) &&
         std::isfinite(r.visibility) && std::isfinite(r.iou) && std::isfinite(r.alpha_c) && std::isfinite(r.alpha_p) &&
         std::isfinite(r.reward);
}

}  // namespace

EpisodeRecord run_episode(Agent& agent, const Scene& scene, const EnvConfig& env, RunMode mode, RolloutBuffer* sink) {
  EpisodeRecord rec;
  rec.scene_id = scene.scene_id;
  rec.agent = agent.name();
  rec.rows.reserve(static_cast<std::size_t>(env.episode_len));

  WorldState world = initial_world(scene, env.sim, env.initial_knobs);
  double vis = visibility(world.knobs, env.perception);
  DetectionResult det = sense(world, env.perception, env.sim, scene.noise_seed);
  ControlSignal control = behavior_control(det, world.ego_speed, env.controller, env.sim);

  for (std::int64_t t = 0; t < env.episode_len; ++t) {
    const FeatureState features = featurize(world, det, vis, env.sim);
    const AgentDecision decision = agent.decide(features, mode);

    world.knobs = apply_action(world.knobs, decision.action, env.frozen);
    world = step(world, control, scene, env.sim);
    vis = visibility(world.knobs, env.perception);
    det = sense(world, env.perception, env.sim, scene.noise_seed);
    control = behavior_control(det, world.ego_speed, env.controller, env.sim);

    EpisodeRow row;
    row.tick = world.tick;
    row.knobs = world.knobs.to_array();
    row.gap = gap_of(world, env.sim.vehicle_length);
    row.ego_speed = world.ego_speed;
    row.lead_speed = world.lead_speed;
    row.visibility = vis;
    row.detected = det.detected;
    row.iou = det.iou;
    row.collided = world.collided;
    const StepViolation sv = step_violation({row.ego_speed, row.gap, row.collided}, env.rulebook.proximity_threshold);
    row.alpha_c = sv.alpha_c;
    row.alpha_p = sv.alpha_p;
    row.reward = step_reward(row.iou, row.alpha_c, row.alpha_p, env.rulebook.weights);

    if (!finite_row(row) || !std::isfinite(decision.log_prob) || !std::isfinite(decision.value)) {
      rec.aborted = true;
      rec.diagnostic = "non-finite value at tick " + std::to_string(world.tick) + " of scene " + scene.scene_id;
      break;
    }
    rec.rows.push_back(row);
    if (sink) {
      sink->push(features, decision.raw, decision.log_prob, row.reward, decision.value, t + 1 == env.episode_len);
    }
  }

  rec.totals = recompute_totals(rec.rows, env.rulebook);
  const std::vector<TickObservation> obs = observations_of(rec.rows);
  rec.failure = classify_failure(obs, env.failure);
  return rec;
}

Realization realization_of(std::span<const EpisodeRow> rows) {
  Realization r;
  r.reserve(rows.size());
  for (const EpisodeRow& row : rows) r.push_back({row.ego_speed, row.gap, row.collided});
  return r;
}

std::vector<TickObservation> observations_of(std::span<const EpisodeRow> rows) {
  std::vector<TickObservation> obs;
  obs.reserve(rows.size());
  for (const EpisodeRow& row : rows) obs.push_back({row.detected, row.gap, row.ego_speed, row.collided});
  return obs;
}

EpisodeTotals recompute_totals(std::span<const EpisodeRow> rows, const RulebookConfig& rules) {
  EpisodeTotals t;
  const Realization r = realization_of(rows);
  const ViolationScores v = evaluate(r, rules.proximity_threshold);
  t.lambda_c = v.lambda_c;
  t.lambda_p = v.lambda_p;
  for (const EpisodeRow& row : rows) {
    t.reward += row.reward;
    t.deficit += mfd_deficit(row.gap, rss_min_distance(row.ego_speed, row.lead_speed, rules.rss_decel));
  }
  return t;
}

std::string episode_to_jsonl(const EpisodeRecord& rec, const EnvConfig& env) {
  std::ostringstream out;
  OrderedJson header = {
      {"type", "header"},
      {"format", "edgegen-episode"},
      {"version", 1},
      {"scene_id", rec.scene_id},
      {"agent", rec.agent},
      {"episode_len", env.episode_len},
      {"rulebook",
       {{"w_c", env.rulebook.weights.w_c},
        {"w_p", env.rulebook.weights.w_p},
        {"proximity_threshold", env.rulebook.proximity_threshold},
        {"rss_decel", env.rulebook.rss_decel}}},
      {"failure",
       {{"window_ticks", env.failure.window_ticks},
        {"dropout_ticks", env.failure.dropout_ticks},
        {"decel", env.failure.decel}}},
  };
  out << header.dump() << '\n';
  for (const EpisodeRow& r : rec.rows) {
    OrderedJson row = {{"tick", r.tick},     {"knobs", r.knobs},         {"gap", r.gap},
                       {"ego_speed", r.ego_speed}, {"lead_speed", r.lead_speed}, {"visibility", r.visibility},
                       {"detected", r.detected},   {"iou", r.iou},             {"collided", r.collided},
                       {"alpha_c", r.alpha_c},     {"alpha_p", r.alpha_p},     {"reward", r.reward}};
    out << row.dump() << '\n';
  }
  OrderedJson summary = {{"type", "summary"},
                         {"rows", rec.rows.size()},
                         {"lambda_c", rec.totals.lambda_c},
                         {"lambda_p", rec.totals.lambda_p},
                         {"reward_sum", rec.totals.reward},
                         {"deficit_sum", rec.totals.deficit},
                         {"failure_mode", std::string(to_string(rec.failure))},
                         {"aborted", rec.aborted},
                         {"diagnostic", rec.diagnostic}};
  out << summary.dump() << '\n';
  return out.str();
}

EpisodeLog parse_episode_jsonl(std::string_view text) {
  EpisodeLog log;
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > pos) lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  if (lines.size() < 2) throw ParseError("episode log: expected a header and a summary line");

  auto parse_line = [&](std::size_t i) {
    try {
      return Json::parse(lines[i]);
    } catch (const Json::parse_error& e) {
      throw ParseError("episode log: malformed JSON on line " + std::to_string(i + 1) + ": " + e.what());
    }
  };

  const Json header = parse_line(0);
  if (!header.is_object() || header.value("type", "") != "header") {
    throw ParseError("episode log: line 1 is not a header");
  }
  if (detail::get_int(header, "version", "header") != 1) throw VersionError("episode log: unsupported version");
  log.record.scene_id = detail::get_string(header, "scene_id", "header");
  log.record.agent = detail::get_string(header, "agent", "header");
  log.episode_len = detail::get_int(header, "episode_len", "header");
  const Json& rb = detail::require(header, "rulebook", "header");
  log.rules.weights.w_c = detail::get_number(rb, "w_c", "header.rulebook");
  log.rules.weights.w_p = detail::get_number(rb, "w_p", "header.rulebook");
  log.rules.proximity_threshold = detail::get_number(rb, "proximity_threshold", "header.rulebook");
  log.rules.rss_decel = detail::get_number(rb, "rss_decel", "header.rulebook");
  const Json& fc = detail::require(header, "failure", "header");
  log.failure.window_ticks = detail::get_int(fc, "window_ticks", "header.failure");
  log.failure.dropout_ticks = detail::get_int(fc, "dropout_ticks", "header.failure");
  log.failure.decel = detail::get_number(fc, "decel", "header.failure");

  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    const Json j = parse_line(i);
    const std::string where = "line " + std::to_string(i + 1);
    EpisodeRow r;
    r.tick = detail::get_int(j, "tick", where);
    const Json& knobs = detail::require(j, "knobs", where);
    if (!knobs.is_array() || knobs.size() != kKnobCount) throw ParseError(where + ": knobs must have 5 entries");
    for (std::size_t k = 0; k < kKnobCount; ++k) {
      if (!knobs[k].is_number()) throw ParseError(where + ": knobs must be numbers");
      r.knobs[k] = knobs[k].get<double>();
    }
    r.gap = detail::get_number(j, "gap", where);
    r.ego_speed = detail::get_number(j, "ego_speed", where);
    r.lead_speed = detail::get_number(j, "lead_speed", where);
    r.visibility = detail::get_number(j, "visibility", where);
    r.detected = detail::get_bool(j, "detected", where);
    r.iou = detail::get_number(j, "iou", where);
    r.collided = detail::get_bool(j, "collided", where);
    r.alpha_c = detail::get_number(j, "alpha_c", where);
    r.alpha_p = detail::get_number(j, "alpha_p", where);
    r.reward = detail::get_number(j, "reward", where);
    log.record.rows.push_back(r);
  }

  const Json summary = parse_line(lines.size() - 1);
  const std::string sw = "summary (line " + std::to_string(lines.size()) + ")";
  if (!summary.is_object() || summary.value("type", "") != "summary") {
    throw ParseError("episode log: last line is not a summary (truncated file?)");
  }
  log.record.totals.lambda_c = detail::get_number(summary, "lambda_c", sw);
  log.record.totals.lambda_p = detail::get_number(summary, "lambda_p", sw);
  log.record.totals.reward = detail::get_number(summary, "reward_sum", sw);
  log.record.totals.deficit = detail::get_number(summary, "deficit_sum", sw);
  log.record.failure = failure_mode_from_string(detail::get_string(summary, "failure_mode", sw));
  log.record.aborted = detail::get_bool(summary, "aborted", sw);
  log.record.diagnostic = detail::get_string(summary, "diagnostic", sw);
  const std::int64_t declared_rows = detail::get_int(summary, "rows", sw);
  if (declared_rows != static_cast<std::int64_t>(log.record.rows.size())) {
    throw ParseError("episode log: summary declares " + std::to_string(declared_rows) + " rows but " +
                     std::to_string(log.record.rows.size()) + " were found");
  }
  return log;
}

ReplayCheck verify_episode(const EpisodeLog& log) {
  ReplayCheck check;
  const EpisodeRecord& rec = log.record;
  check.recomputed = recompute_totals(rec.rows, log.rules);
  check.recomputed_failure = classify_failure(observations_of(rec.rows), log.failure);

  auto compare = [&](std::string_view name, double stored, double recomputed) {
    if (!(std::abs(stored - recomputed) <= 1e-9)) {
      check.ok = false;
      check.mismatches.push_back(std::string(name) + ": stored " + format_double(stored) + ", recomputed " +
                                 format_double(recomputed));
    }
  };
  compare("lambda_c", rec.totals.lambda_c, check.recomputed.lambda_c);
  compare("lambda_p", rec.totals.lambda_p, check.recomputed.lambda_p);
  compare("reward_sum", rec.totals.reward, check.recomputed.reward);
  compare("deficit_sum", rec.totals.deficit, check.recomputed.deficit);

  for (const EpisodeRow& r : rec.rows) {
    const StepViolation sv = step_violation({r.ego_speed, r.gap, r.collided}, log.rules.proximity_threshold);
    const double reward = step_reward(r.iou, sv.alpha_c, sv.alpha_p, log.rules.weights);
    if (!(std::abs(sv.alpha_c - r.alpha_c) <= 1e-9 && std::abs(sv.alpha_p - r.alpha_p) <= 1e-9 &&
          std::abs(reward - r.reward) <= 1e-9)) {
      check.ok = false;
      check.mismatches.push_back("tick " + std::to_string(r.tick) + ": rule terms or reward disagree with the row");
    }
  }
  if (check.recomputed_failure != rec.failure) {
    check.ok = false;
    check.mismatches.push_back("failure_mode: stored " + std::string(to_string(rec.failure)) + ", recomputed " +
                               std::string(to_string(check.recomputed_failure)));
  }
  if (!rec.aborted && static_cast<std::int64_t>(rec.rows.size()) != log.episode_len) {
    check.ok = false;
    check.mismatches.push_back("row count " + std::to_string(rec.rows.size()) + " != episode_len " +
                               std::to_string(log.episode_len));
  }
  return check;
}

}  // namespace edgegen
