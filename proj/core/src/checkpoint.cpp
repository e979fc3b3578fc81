#include "edgegen/checkpoint.hpp"

#include <string>

#include "edgegen/errors.hpp"
#include "edgegen/io.hpp"
#include "json_util.hpp"

namespace edgegen {

using detail::Json;
using OrderedJson = nlohmann::ordered_json;

namespace {

OrderedJson mlp_to_json(const Mlp& m) {
  OrderedJson layers = OrderedJson::array();
  for (const DenseLayer& l : m.layers()) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weight", l.weight}, {"bias", l.bias}});
  }
  return {{"layers", layers}};
}

std::vector<double> number_array(const Json& j, std::string_view where) {
  if (!j.is_array()) throw ParseError(std::string(where) + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& v : j) {
    if (!v.is_number()) throw ParseError(std::string(where) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Mlp mlp_from_json(const Json& j, const std::string& where) {
  const Json& layers = detail::require(j, "layers", where);
  if (!layers.is_array() || layers.empty()) throw ParseError(where + ".layers: expected a non-empty array");
  std::vector<std::size_t> widths;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string lw = where + ".layers[" + std::to_string(i) + "]";
    const auto in = static_cast<std::size_t>(detail::get_int(layers[i], "in", lw));
    const auto out = static_cast<std::size_t>(detail::get_int(layers[i], "out", lw));
    if (i == 0) widths.push_back(in);
    if (in != widths.back()) throw ParseError(lw + ": input width does not match previous layer");
    widths.push_back(out);
  }
  Mlp m(widths);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::string lw = where + ".layers[" + std::to_string(i) + "]";
    DenseLayer& l = m.layers()[i];
    l.weight = number_array(detail::require(layers[i], "weight", lw), lw + ".weight");
    l.bias = number_array(detail::require(layers[i], "bias", lw), lw + ".bias");
    if (l.weight.size() != l.in * l.out || l.bias.size() != l.out) {
      throw ParseError(lw + ": coefficient count does not match the declared shape");
    }
  }
  return m;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& c) {
  const OrderedJson doc = {
      {"format", "edgegen-checkpoint"},
      {"version", kCheckpointVersion},
      {"completed_updates", c.completed_updates},
      {"env_steps", c.env_steps},
      {"seed", c.seed},
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
        {"total_steps", c.ppo.total_steps}}},
      {"networks",
       {{"policy", mlp_to_json(c.params.policy)},
        {"log_std", c.params.log_std},
        {"value", mlp_to_json(c.params.value)}}},
      {"optimizer", {{"steps", c.optimizer_steps}, {"m", c.optimizer_m}, {"v", c.optimizer_v}}},
      {"reward_scaler", {{"count", c.reward_count}, {"mean", c.reward_mean}, {"var", c.reward_var}}},
  };
  return doc.dump() + "\n";
}

Checkpoint parse_checkpoint(std::string_view text) {
  const Json doc = detail::parse_json(text, "checkpoint");
  if (!doc.is_object() || doc.value("format", "") != "edgegen-checkpoint") {
    throw ParseError("checkpoint: not an edgegen checkpoint");
  }
  const std::int64_t version = detail::get_int(doc, "version", "checkpoint");
  if (version != kCheckpointVersion) {
    throw VersionError("checkpoint: unsupported version " + std::to_string(version));
  }
  Checkpoint c;
  c.completed_updates = detail::get_int(doc, "completed_updates", "checkpoint");
  c.env_steps = detail::get_int(doc, "env_steps", "checkpoint");
  c.seed = detail::get_uint(doc, "seed", "checkpoint");

  const Json& p = detail::require(doc, "ppo", "checkpoint");
  constexpr std::string_view pw = "checkpoint.ppo";
  c.ppo.gamma = detail::get_number(p, "gamma", pw);
  c.ppo.gae_lambda = detail::get_number(p, "gae_lambda", pw);
  c.ppo.clip_ratio = detail::get_number(p, "clip_ratio", pw);
  c.ppo.learn_rate = detail::get_number(p, "learn_rate", pw);
  c.ppo.epochs_per_update = static_cast<int>(detail::get_int(p, "epochs_per_update", pw));
  c.ppo.minibatch_size = static_cast<int>(detail::get_int(p, "minibatch_size", pw));
  c.ppo.value_coeff = detail::get_number(p, "value_coeff", pw);
  c.ppo.entropy_coeff = detail::get_number(p, "entropy_coeff", pw);
  c.ppo.max_grad_norm = detail::get_number(p, "max_grad_norm", pw);
  c.ppo.normalize_rewards = detail::get_bool(p, "normalize_rewards", pw);
  c.ppo.episode_len = detail::get_int(p, "episode_len", pw);
  c.ppo.episodes_per_update = detail::get_int(p, "episodes_per_update", pw);
  c.ppo.total_steps = detail::get_int(p, "total_steps", pw);

  const Json& nets = detail::require(doc, "networks", "checkpoint");
  c.params.policy = mlp_from_json(detail::require(nets, "policy", "checkpoint.networks"), "checkpoint.networks.policy");
  c.params.value = mlp_from_json(detail::require(nets, "value", "checkpoint.networks"), "checkpoint.networks.value");
  c.params.log_std = number_array(detail::require(nets, "log_std", "checkpoint.networks"), "checkpoint.networks.log_std");
  if (c.params.log_std.size() != c.params.policy.output_size()) {
    throw ParseError("checkpoint: log_std width does not match the policy head");
  }
  if (c.params.value.output_size() != 1 || c.params.value.input_size() != c.params.policy.input_size()) {
    throw ParseError("checkpoint: value network shape does not match the policy network");
  }

  const Json& opt = detail::require(doc, "optimizer", "checkpoint");
  c.optimizer_steps = detail::get_int(opt, "steps", "checkpoint.optimizer");
  c.optimizer_m = number_array(detail::require(opt, "m", "checkpoint.optimizer"), "checkpoint.optimizer.m");
  c.optimizer_v = number_array(detail::require(opt, "v", "checkpoint.optimizer"), "checkpoint.optimizer.v");
  if (c.optimizer_m.size() != c.params.size() || c.optimizer_v.size() != c.params.size()) {
    throw ParseError("checkpoint: optimizer moments do not match the parameter count");
  }
  const Json& rs = detail::require(doc, "reward_scaler", "checkpoint");
  c.reward_count = detail::get_number(rs, "count", "checkpoint.reward_scaler");
  c.reward_mean = detail::get_number(rs, "mean", "checkpoint.reward_scaler");
  c.reward_var = detail::get_number(rs, "var", "checkpoint.reward_scaler");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  write_file_atomic(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return parse_checkpoint(read_file(path)); }

}  // namespace edgegen
