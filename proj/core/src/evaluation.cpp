#include "edgegen/evaluation.hpp"

#include <algorithm>
#include <string>

#include "edgegen/agents.hpp"
#include "edgegen/catalog.hpp"
#include "edgegen/checkpoint.hpp"
#include "edgegen/errors.hpp"
#include "edgegen/io.hpp"
#include "json_util.hpp"

namespace edgegen {

using detail::Json;
using OrderedJson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kCsvHeader =
    "agent,index,scene_id,lambda_c,lambda_p,reward_sum,deficit_sum,collided,failure_mode";

constexpr std::array<FailureMode, 4> kModes{FailureMode::kNone, FailureMode::kNonDetection, FailureMode::kIntermittent,
                                            FailureMode::kDelayed};

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::size_t parse_index(std::string_view s, const std::string& where) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(where + ": bad index '" + std::string(s) + "'");
  }
  return static_cast<std::size_t>(std::stoull(std::string(s)));
}

std::string padded(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

}  // namespace

EpisodeSummary summarize(const EpisodeRecord& rec, std::size_t index) {
  EpisodeSummary s;
  s.agent = rec.agent;
  s.index = index;
  s.scene_id = rec.scene_id;
  s.lambda_c = rec.totals.lambda_c;
  s.lambda_p = rec.totals.lambda_p;
  s.reward_sum = rec.totals.reward;
  s.deficit_sum = rec.totals.deficit;
  s.collided = rec.collided();
  s.failure = rec.failure;
  return s;
}

const AgentSummary* EvaluationReport::find(std::string_view agent) const {
  const auto it = std::find_if(agents.begin(), agents.end(), [&](const AgentSummary& a) { return a.agent == agent; });
  return it == agents.end() ? nullptr : &*it;
}

std::vector<AgentSummary> aggregate(std::span<const EpisodeSummary> episodes) {
  std::vector<AgentSummary> out;
  for (const EpisodeSummary& e : episodes) {
    auto it = std::find_if(out.begin(), out.end(), [&](const AgentSummary& a) { return a.agent == e.agent; });
    if (it == out.end()) {
      out.push_back(AgentSummary{.agent = e.agent});
      it = out.end() - 1;
    }
    ++it->episodes;
    it->mean_lambda_c += e.lambda_c;
    it->mean_lambda_p += e.lambda_p;
    it->mean_reward += e.reward_sum;
    it->deficit_sum += e.deficit_sum;
    if (e.collided) ++it->collisions;
    ++it->failure_counts[static_cast<std::size_t>(e.failure)];
  }
  for (AgentSummary& a : out) {
    const auto n = static_cast<double>(a.episodes);
    a.mean_lambda_c /= n;
    a.mean_lambda_p /= n;
    a.mean_reward /= n;
  }
  return out;
}

EvaluationReport evaluate_agents(std::span<const Scene> subset, const EnvConfig& env, std::uint64_t agent_seed,
                                 const PolicyParams* policy, const EpisodeSink& sink) {
  EvaluationReport report;
  auto record = [&](const EpisodeRecord& rec, std::size_t i) {
    if (sink) sink(rec, i);
    report.episodes.push_back(summarize(rec, i));
  };
  const RngStream agent_root(agent_seed);

  for (std::size_t i = 0; i < subset.size(); ++i) {
    ClearAgent agent;
    record(run_episode(agent, subset[i], env, RunMode::kEval), i);
  }
  for (std::size_t i = 0; i < subset.size(); ++i) {
    RandomAgent agent(agent_root.split(i));
    record(run_episode(agent, subset[i], env, RunMode::kEval), i);
  }
  if (policy != nullptr) {
    for (std::size_t i = 0; i < subset.size(); ++i) {
      PolicyAgent agent(*policy, agent_root.split(i));
      record(run_episode(agent, subset[i], env, RunMode::kEval), i);
    }
  }
  report.agents = aggregate(report.episodes);
  return report;
}

std::string report_to_json(const EvaluationReport& r) {
  OrderedJson agents = OrderedJson::array();
  for (const AgentSummary& a : r.agents) {
    OrderedJson modes = OrderedJson::object();
    for (FailureMode m : kModes) modes[std::string(to_string(m))] = a.failure_counts[static_cast<std::size_t>(m)];
    agents.push_back({{"agent", a.agent},
                      {"episodes", a.episodes},
                      {"mean_lambda_c", a.mean_lambda_c},
                      {"mean_lambda_p", a.mean_lambda_p},
                      {"mean_violation", a.mean_violation()},
                      {"mean_reward", a.mean_reward},
                      {"deficit_sum", a.deficit_sum},
                      {"collisions", a.collisions},
                      {"failure_modes", modes}});
  }
  OrderedJson episodes = OrderedJson::array();
  for (const EpisodeSummary& e : r.episodes) {
    episodes.push_back({{"agent", e.agent},
                        {"index", e.index},
                        {"scene_id", e.scene_id},
                        {"lambda_c", e.lambda_c},
                        {"lambda_p", e.lambda_p},
                        {"reward_sum", e.reward_sum},
                        {"deficit_sum", e.deficit_sum},
                        {"collided", e.collided},
                        {"failure_mode", to_string(e.failure)}});
  }
  const OrderedJson doc = {{"format", "edgegen-report"},
                           {"schema_version", r.schema_version},
                           {"agents", agents},
                           {"episodes", episodes}};
  return doc.dump(1) + "\n";
}

std::string report_to_csv(const EvaluationReport& r) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const EpisodeSummary& e : r.episodes) {
    out += e.agent + ',' + std::to_string(e.index) + ',' + e.scene_id + ',' + format_double(e.lambda_c) + ',' +
           format_double(e.lambda_p) + ',' + format_double(e.reward_sum) + ',' + format_double(e.deficit_sum) + ',' +
           (e.collided ? "1" : "0") + ',' + std::string(to_string(e.failure)) + '\n';
  }
  return out;
}

std::string summary_to_csv(std::span<const AgentSummary> agents) {
  std::string out =
      "agent,episodes,mean_lambda_c,mean_lambda_p,mean_violation,mean_reward,deficit_sum,collisions,none,"
      "non_detection,intermittent,delayed\n";
  for (const AgentSummary& a : agents) {
    out += a.agent + ',' + std::to_string(a.episodes) + ',' + format_double(a.mean_lambda_c) + ',' +
           format_double(a.mean_lambda_p) + ',' + format_double(a.mean_violation()) + ',' +
           format_double(a.mean_reward) + ',' + format_double(a.deficit_sum) + ',' + std::to_string(a.collisions);
    for (std::int64_t c : a.failure_counts) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

EvaluationReport parse_report_csv(std::string_view text) {
  EvaluationReport r;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const std::string where = "report.csv line " + std::to_string(line_no);
    if (line_no == 1) {
      if (line != kCsvHeader) throw ParseError(where + ": unexpected header");
      continue;
    }
    if (line.empty()) continue;
    const auto f = split_fields(line);
    if (f.size() != 9) throw ParseError(where + ": expected 9 fields, got " + std::to_string(f.size()));
    EpisodeSummary e;
    try {
      e.agent = std::string(f[0]);
      e.index = parse_index(f[1], where);
      e.scene_id = std::string(f[2]);
      e.lambda_c = parse_double(f[3]);
      e.lambda_p = parse_double(f[4]);
      e.reward_sum = parse_double(f[5]);
      e.deficit_sum = parse_double(f[6]);
      if (f[7] != "0" && f[7] != "1") throw ParseError("collided must be 0 or 1");
      e.collided = f[7] == "1";
      e.failure = failure_mode_from_string(f[8]);
    } catch (const ParseError& ex) {
      throw ParseError(where + ": " + ex.what());
    }
    r.episodes.push_back(std::move(e));
  }
  if (line_no == 0) throw ParseError("report.csv: empty file");
  r.agents = aggregate(r.episodes);
  return r;
}

EvaluationReport parse_report_json(std::string_view text) {
  const Json doc = detail::parse_json(text, "report");
  if (!doc.is_object() || doc.value("format", "") != "edgegen-report") throw ParseError("report: not an edgegen report");
  EvaluationReport r;
  r.schema_version = static_cast<int>(detail::get_int(doc, "schema_version", "report"));
  if (r.schema_version != kReportSchemaVersion) {
    throw VersionError("report: unsupported schema_version " + std::to_string(r.schema_version));
  }
  for (const Json& a : detail::require(doc, "agents", "report")) {
    AgentSummary s;
    s.agent = detail::get_string(a, "agent", "report.agents");
    s.episodes = static_cast<std::size_t>(detail::get_uint(a, "episodes", "report.agents"));
    s.mean_lambda_c = detail::get_number(a, "mean_lambda_c", "report.agents");
    s.mean_lambda_p = detail::get_number(a, "mean_lambda_p", "report.agents");
    s.mean_reward = detail::get_number(a, "mean_reward", "report.agents");
    s.deficit_sum = detail::get_number(a, "deficit_sum", "report.agents");
    s.collisions = detail::get_int(a, "collisions", "report.agents");
    const Json& modes = detail::require(a, "failure_modes", "report.agents");
    for (FailureMode m : kModes) {
      s.failure_counts[static_cast<std::size_t>(m)] = detail::get_int(modes, to_string(m), "report.agents.failure_modes");
    }
    r.agents.push_back(std::move(s));
  }
  for (const Json& e : detail::require(doc, "episodes", "report")) {
    EpisodeSummary s;
    s.agent = detail::get_string(e, "agent", "report.episodes");
    s.index = static_cast<std::size_t>(detail::get_uint(e, "index", "report.episodes"));
    s.scene_id = detail::get_string(e, "scene_id", "report.episodes");
    s.lambda_c = detail::get_number(e, "lambda_c", "report.episodes");
    s.lambda_p = detail::get_number(e, "lambda_p", "report.episodes");
    s.reward_sum = detail::get_number(e, "reward_sum", "report.episodes");
    s.deficit_sum = detail::get_number(e, "deficit_sum", "report.episodes");
    s.collided = detail::get_bool(e, "collided", "report.episodes");
    s.failure = failure_mode_from_string(detail::get_string(e, "failure_mode", "report.episodes"));
    r.episodes.push_back(std::move(s));
  }
  return r;
}

EvaluationReport run_eval(const HarnessConfig& cfg, const EvalRequest& req) {
  const std::string catalog_text = read_file(req.catalog);
  const SceneCatalog catalog = parse_catalog(catalog_text);
  if (catalog.scenes.size() < cfg.eval.subset_size) {
    throw InvalidArgument("catalog has " + std::to_string(catalog.scenes.size()) + " scenes, subset needs " +
                          std::to_string(cfg.eval.subset_size));
  }
  std::optional<Checkpoint> ckpt;
  std::string ckpt_hash;
  if (req.checkpoint) {
    if (!std::filesystem::exists(*req.checkpoint)) {
      throw InvalidArgument("checkpoint not found: " + req.checkpoint->string());
    }
    const std::string text = read_file(*req.checkpoint);
    ckpt = parse_checkpoint(text);
    ckpt_hash = hex64(fnv1a64(text));
    if (ckpt->params.input_width() != kFeatureCount || ckpt->params.action_width() != kKnobCount) {
      throw InvalidArgument("checkpoint network does not match the feature/action widths");
    }
  }

  const std::vector<Scene> subset = select_test_subset(catalog, cfg.eval.subset_size, cfg.eval.subset_seed);
  const EnvConfig env = cfg.env();

  const std::filesystem::path episodes_dir = req.out_dir / "episodes";
  std::filesystem::create_directories(req.out_dir);
  std::filesystem::remove_all(episodes_dir);
  const EpisodeSink sink = [&](const EpisodeRecord& rec, std::size_t i) {
    const std::filesystem::path dir = episodes_dir / rec.agent;
    std::filesystem::create_directories(dir);
    write_file_atomic(dir / (padded(i) + "_" + rec.scene_id + ".jsonl"), episode_to_jsonl(rec, env));
  };
  EvaluationReport report =
      evaluate_agents(subset, env, cfg.eval.agent_seed, ckpt ? &ckpt->params : nullptr, sink);

  write_file_atomic(req.out_dir / "report.json", report_to_json(report));
  write_file_atomic(req.out_dir / "report.csv", report_to_csv(report));

  OrderedJson subset_ids = OrderedJson::array();
  for (const Scene& s : subset) subset_ids.push_back(s.scene_id);
  const OrderedJson manifest = {
      {"type", "eval"},
      {"created", utc_timestamp()},
      {"config", OrderedJson::parse(config_to_json(cfg))},
      {"catalog",
       {{"path", req.catalog.string()},
        {"fnv1a64", hex64(fnv1a64(catalog_text))},
        {"scenes", catalog.scenes.size()},
        {"generator_seed", catalog.generator_seed}}},
      {"checkpoint",
       ckpt ? OrderedJson{{"path", req.checkpoint->string()}, {"fnv1a64", ckpt_hash}} : OrderedJson(nullptr)},
      {"seeds",
       {{"subset_seed", cfg.eval.subset_seed}, {"agent_seed", cfg.eval.agent_seed}, {"ppo_seed", cfg.training.seed}}},
      {"seed_env_override",
       cfg.seed_override ? OrderedJson{{"variable", kSeedEnvVar}, {"value", *cfg.seed_override}} : OrderedJson(nullptr)},
      {"subset", subset_ids},
  };
  write_file_atomic(req.out_dir / "manifest.json", manifest.dump(1) + "\n");
  return report;
}

}  // namespace edgegen
