#include "edgegen/training.hpp"

#include <string>

#include "edgegen/agents.hpp"
#include "edgegen/errors.hpp"
#include "edgegen/episode.hpp"
#include "edgegen/io.hpp"
#include "json_util.hpp"

namespace edgegen {

using OrderedJson = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kInitTag = ~std::uint64_t{0};
constexpr std::uint64_t kShuffleTag = 1'000'000;

constexpr std::string_view kCurveHeader =
    "update,env_steps,mean_reward,mean_lambda_c,mean_lambda_p,surrogate,value_loss,entropy,approx_kl,clip_fraction";

}  // namespace

std::string curve_header() { return std::string(kCurveHeader) + "\n"; }

std::string curve_line(const CurveRow& r) {
  return std::to_string(r.update) + ',' + std::to_string(r.env_steps) + ',' + format_double(r.mean_reward) + ',' +
         format_double(r.mean_lambda_c) + ',' + format_double(r.mean_lambda_p) + ',' + format_double(r.surrogate) +
         ',' + format_double(r.value_loss) + ',' + format_double(r.entropy) + ',' + format_double(r.approx_kl) + ',' +
         format_double(r.clip_fraction) + "\n";
}

std::vector<CurveRow> parse_curve_csv(std::string_view text) {
  std::vector<CurveRow> rows;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    const std::string where = "training curve line " + std::to_string(line_no);
    if (line_no == 1) {
      if (line != kCurveHeader) throw ParseError(where + ": unexpected header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (std::size_t c = line.find(','); c != std::string_view::npos; c = line.find(',', start)) {
      f.push_back(line.substr(start, c - start));
      start = c + 1;
    }
    f.push_back(line.substr(start));
    if (f.size() != 10) throw ParseError(where + ": expected 10 fields");
    try {
      CurveRow r;
      r.update = static_cast<std::int64_t>(parse_double(f[0]));
      r.env_steps = static_cast<std::int64_t>(parse_double(f[1]));
      r.mean_reward = parse_double(f[2]);
      r.mean_lambda_c = parse_double(f[3]);
      r.mean_lambda_p = parse_double(f[4]);
      r.surrogate = parse_double(f[5]);
      r.value_loss = parse_double(f[6]);
      r.entropy = parse_double(f[7]);
      r.approx_kl = parse_double(f[8]);
      r.clip_fraction = parse_double(f[9]);
      rows.push_back(r);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return rows;
}

std::string_view to_string(TrainStatus s) {
  switch (s) {
    case TrainStatus::kComplete: return "complete";
    case TrainStatus::kStopped: return "stopped";
    case TrainStatus::kFailed: return "failed";
  }
  return "unknown";
}

TrainResult train_policy(const SceneCatalog& catalog, const HarnessConfig& cfg, const Checkpoint* resume,
                         std::optional<std::int64_t> stop_after, const UpdateHook& hook) {
  cfg.validate();
  if (catalog.scenes.empty()) throw InvalidArgument("training catalog is empty");
  const std::uint64_t seed = cfg.training.seed;
  const RngStream root(seed);
  const EnvConfig env = cfg.env();

  TrainResult result;
  Checkpoint& ck = result.checkpoint;
  Adam opt;
  RewardScaler scaler(cfg.ppo.gamma);
  if (resume != nullptr) {
    if (resume->seed != seed) {
      throw InvalidArgument("checkpoint seed " + std::to_string(resume->seed) + " does not match config seed " +
                            std::to_string(seed));
    }
    if (resume->ppo.episode_len != cfg.ppo.episode_len ||
        resume->ppo.episodes_per_update != cfg.ppo.episodes_per_update) {
      throw InvalidArgument("checkpoint batch shape does not match the config");
    }
    if (resume->params.input_width() != kFeatureCount || resume->params.action_width() != kKnobCount) {
      throw InvalidArgument("checkpoint network does not match the feature/action widths");
    }
    ck = *resume;
    ck.ppo = cfg.ppo;
    opt = Adam(ck.params.size(), cfg.ppo.learn_rate);
    opt.restore(ck.optimizer_steps, ck.optimizer_m, ck.optimizer_v);
    scaler.restore(ck.reward_count, ck.reward_mean, ck.reward_var);
  } else {
    RngStream init = root.split(kInitTag);
    ck.params = PolicyParams::create(kFeatureCount, cfg.training.hidden, kKnobCount, init);
    ck.seed = seed;
    ck.ppo = cfg.ppo;
    opt = Adam(ck.params.size(), cfg.ppo.learn_rate);
  }

  const std::int64_t total = cfg.ppo.update_count();
  std::int64_t done_here = 0;
  RolloutBuffer buf;
  for (std::int64_t u = ck.completed_updates; u < total; ++u) {
    if (stop_after && done_here >= *stop_after) {
      result.status = TrainStatus::kStopped;
      return result;
    }
    const RngStream update_rng = root.split(static_cast<std::uint64_t>(u));
    buf.clear();
    CurveRow row;
    row.update = u;
    for (std::int64_t e = 0; e < cfg.ppo.episodes_per_update; ++e) {
      RngStream ep_rng = update_rng.split(static_cast<std::uint64_t>(e));
      const Scene& scene = catalog.scenes[ep_rng.below(catalog.scenes.size())];
      PolicyAgent agent(ck.params, ep_rng.split(1));
      const std::size_t first_row = buf.size();
      const EpisodeRecord rec = run_episode(agent, scene, env, RunMode::kTrain, &buf);
      if (cfg.ppo.normalize_rewards) {
        for (std::size_t i = first_row; i < buf.size(); ++i) {
          buf.rewards[i] = scaler.scale(buf.rewards[i], buf.terminals[i] != 0);
        }
      }
      if (rec.aborted) {
        result.status = TrainStatus::kFailed;
        result.diagnostic = "update " + std::to_string(u) + ", scene " + scene.scene_id + ": " + rec.diagnostic;
        return result;
      }
      row.mean_reward += rec.totals.reward;
      row.mean_lambda_c += rec.totals.lambda_c;
      row.mean_lambda_p += rec.totals.lambda_p;
    }
    const auto episodes = static_cast<double>(cfg.ppo.episodes_per_update);
    row.mean_reward /= episodes;
    row.mean_lambda_c /= episodes;
    row.mean_lambda_p /= episodes;

    RngStream shuffle = update_rng.split(kShuffleTag);
    try {
      const TrainStats stats = ppo_update(ck.params, opt, buf, cfg.ppo, shuffle);
      row.surrogate = stats.surrogate;
      row.value_loss = stats.value_loss;
      row.entropy = stats.entropy;
      row.approx_kl = stats.approx_kl;
      row.clip_fraction = stats.clip_fraction;
    } catch (const NonFiniteError& e) {
      result.status = TrainStatus::kFailed;
      result.diagnostic = "update " + std::to_string(u) + ": " + e.what();
      return result;
    }

    ck.env_steps += static_cast<std::int64_t>(buf.size());
    ck.completed_updates = u + 1;
    ck.optimizer_steps = opt.steps();
    ck.optimizer_m = opt.first_moment();
    ck.optimizer_v = opt.second_moment();
    ck.reward_count = scaler.count();
    ck.reward_mean = scaler.mean();
    ck.reward_var = scaler.var();
    row.env_steps = ck.env_steps;
    result.curve.push_back(row);
    ++done_here;
    if (hook) hook(row, ck);
  }
  result.status = TrainStatus::kComplete;
  return result;
}

TrainResult run_train(const HarnessConfig& cfg, const TrainRequest& req) {
  if (cfg.training.catalog.empty()) throw InvalidConfig("ppo.catalog must name the training catalog");
  if (!std::filesystem::exists(cfg.training.catalog)) {
    throw InvalidArgument("training catalog not found: " + cfg.training.catalog.string());
  }
  const std::string catalog_text = read_file(cfg.training.catalog);
  const SceneCatalog catalog = parse_catalog(catalog_text);

  std::optional<Checkpoint> resume;
  if (req.resume) {
    if (!std::filesystem::exists(*req.resume)) throw InvalidArgument("checkpoint not found: " + req.resume->string());
    resume = load_checkpoint(*req.resume);
  }

  std::filesystem::create_directories(req.out_dir);
  const std::filesystem::path curve_path = req.out_dir / "training_curve.csv";
  const std::filesystem::path ckpt_path = req.out_dir / "checkpoint.json";

  // A resumed run keeps the curve rows that precede the checkpoint.
  std::string curve_text = curve_header();
  if (resume && std::filesystem::exists(curve_path)) {
    for (const CurveRow& r : parse_curve_csv(read_file(curve_path))) {
      if (r.update < resume->completed_updates) curve_text += curve_line(r);
    }
  }
  write_file_atomic(curve_path, curve_text);

  const UpdateHook hook = [&](const CurveRow& row, const Checkpoint& ck) {
    save_checkpoint(ck, ckpt_path);
    curve_text += curve_line(row);
    write_file_atomic(curve_path, curve_text);
  };
  TrainResult result = train_policy(catalog, cfg, resume ? &*resume : nullptr, req.stop_after, hook);
  if (!std::filesystem::exists(ckpt_path)) save_checkpoint(result.checkpoint, ckpt_path);

  const OrderedJson manifest = {
      {"type", "train"},
      {"created", utc_timestamp()},
      {"status", to_string(result.status)},
      {"diagnostic", result.diagnostic},
      {"config", OrderedJson::parse(config_to_json(cfg))},
      {"seed", cfg.training.seed},
      {"seed_env_override",
       cfg.seed_override ? OrderedJson{{"variable", kSeedEnvVar}, {"value", *cfg.seed_override}} : OrderedJson(nullptr)},
      {"catalog",
       {{"path", cfg.training.catalog.string()},
        {"fnv1a64", hex64(fnv1a64(catalog_text))},
        {"scenes", catalog.scenes.size()},
        {"generator_seed", catalog.generator_seed}}},
      {"resumed_from", req.resume ? OrderedJson(req.resume->string()) : OrderedJson(nullptr)},
      {"completed_updates", result.checkpoint.completed_updates},
      {"planned_updates", cfg.ppo.update_count()},
      {"env_steps", result.checkpoint.env_steps},
      {"checkpoint", ckpt_path.filename().string()},
      {"training_curve", curve_path.filename().string()},
  };
  write_file_atomic(req.out_dir / "manifest.json", manifest.dump(1) + "\n");
  return result;
}

}  // namespace edgegen
