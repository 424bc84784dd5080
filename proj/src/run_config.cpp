#include "nashq/run_config.hpp"

#include <functional>
#include <map>
#include <memory>

#include <yaml-cpp/yaml.h>

#include "nashq/io_util.hpp"
#include "nashq/tabular.hpp"

namespace nashq::cli {
namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(message);
  throw ConfigError("line " + std::to_string(mark.line + 1) + ": " + message);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& key, const char* expected) {
  if (!node.IsScalar()) fail(node, key + ": expected " + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, key + ": expected " + expected + ", got '" + node.Scalar() + "'");
  }
}

double real(const YAML::Node& n, const std::string& key) { return scalar<double>(n, key, "a number"); }
int integer(const YAML::Node& n, const std::string& key) { return scalar<int>(n, key, "an integer"); }
bool boolean(const YAML::Node& n, const std::string& key) { return scalar<bool>(n, key, "true or false"); }
std::string text(const YAML::Node& n, const std::string& key) {
  return scalar<std::string>(n, key, "a string");
}

double positive_real(const YAML::Node& n, const std::string& key) {
  const double v = real(n, key);
  if (!(v > 0.0)) fail(n, key + " must be positive");
  return v;
}
int positive_int(const YAML::Node& n, const std::string& key) {
  const int v = integer(n, key);
  if (v < 1) fail(n, key + " must be positive");
  return v;
}
double probability(const YAML::Node& n, const std::string& key) {
  const double v = real(n, key);
  if (!(v >= 0.0 && v <= 1.0)) fail(n, key + " must lie in [0, 1]");
  return v;
}
double nonnegative(const YAML::Node& n, const std::string& key) {
  const double v = real(n, key);
  if (!(v >= 0.0)) fail(n, key + " must be >= 0");
  return v;
}
double open_unit(const YAML::Node& n, const std::string& key) {
  const double v = real(n, key);
  if (!(v > 0.0 && v < 1.0)) fail(n, key + " must lie in (0, 1)");
  return v;
}

std::vector<int> layer_sizes(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() == 0) fail(n, key + ": expected a non-empty list of sizes");
  std::vector<int> out;
  for (const auto& item : n) out.push_back(positive_int(item, key));
  return out;
}

using Handlers = std::map<std::string, std::function<void(const YAML::Node&)>>;

void walk(const YAML::Node& node, const std::string& section, const Handlers& handlers) {
  if (!node || node.IsNull()) return;
  if (!node.IsMap()) fail(node, (section.empty() ? "config" : section) + ": expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    const std::string path = section.empty() ? key : section + "." + key;
    auto it = handlers.find(key);
    if (it == handlers.end()) fail(kv.first, "unknown key '" + path + "'");
    it->second(kv.second);
  }
}

void parse_train(const YAML::Node& node, train::TrainConfig& c) {
  Handlers h{
      {"discount",
       [&](const YAML::Node& n) {
         c.discount = real(n, "train.discount");
         if (!(c.discount >= 0.0 && c.discount < 1.0)) {
           fail(n, "train.discount must lie in [0, 1), got " + n.Scalar());
         }
       }},
      {"critic_epochs", [&](const YAML::Node& n) { c.critic_epochs = positive_int(n, "train.critic_epochs"); }},
      {"rollout_horizon", [&](const YAML::Node& n) { c.rollout_horizon = positive_int(n, "train.rollout_horizon"); }},
      {"batch_size", [&](const YAML::Node& n) { c.batch_size = positive_int(n, "train.batch_size"); }},
      {"policy_lr", [&](const YAML::Node& n) { c.policy_lr = positive_real(n, "train.policy_lr"); }},
      {"critic_lr", [&](const YAML::Node& n) { c.critic_lr = positive_real(n, "train.critic_lr"); }},
      {"adam_betas",
       [&](const YAML::Node& n) {
         if (!n.IsSequence() || n.size() != 2) fail(n, "train.adam_betas: expected [beta1, beta2]");
         c.adam_beta1 = open_unit(n[0], "train.adam_betas");
         c.adam_beta2 = open_unit(n[1], "train.adam_betas");
       }},
      {"adam_eps", [&](const YAML::Node& n) { c.adam_eps = positive_real(n, "train.adam_eps"); }},
      {"huber_delta", [&](const YAML::Node& n) { c.huber_delta = positive_real(n, "train.huber_delta"); }},
      {"num_workers", [&](const YAML::Node& n) { c.num_workers = positive_int(n, "train.num_workers"); }},
      {"episodes_per_epoch", [&](const YAML::Node& n) { c.episodes_per_epoch = positive_int(n, "train.episodes_per_epoch"); }},
      {"seed", [&](const YAML::Node& n) { c.seed = scalar<std::uint64_t>(n, "train.seed", "an unsigned integer"); }},
      {"policy_hidden", [&](const YAML::Node& n) { c.policy_hidden = layer_sizes(n, "train.policy_hidden"); }},
      {"critic_hidden", [&](const YAML::Node& n) { c.critic_hidden = layer_sizes(n, "train.critic_hidden"); }},
      {"bootstrap_on_truncation", [&](const YAML::Node& n) { c.bootstrap_on_truncation = boolean(n, "train.bootstrap_on_truncation"); }},
      {"frozen_targets", [&](const YAML::Node& n) { c.frozen_targets = boolean(n, "train.frozen_targets"); }},
  };
  walk(node, "train", h);
}

void parse_env(const YAML::Node& node, EnvSection& env, const std::filesystem::path& base_dir) {
  auto& c = env.cyber;
  Handlers weights{
      {"exploited", [&](const YAML::Node& n) { c.weights.exploited = nonnegative(n, "env.weights.exploited"); }},
      {"privileged", [&](const YAML::Node& n) { c.weights.privileged = nonnegative(n, "env.weights.privileged"); }},
      {"impact", [&](const YAML::Node& n) { c.weights.impact = nonnegative(n, "env.weights.impact"); }},
      {"restore_cost", [&](const YAML::Node& n) { c.weights.restore_cost = nonnegative(n, "env.weights.restore_cost"); }},
      {"block_cost", [&](const YAML::Node& n) { c.weights.block_cost = nonnegative(n, "env.weights.block_cost"); }},
  };
  Handlers h{
      {"kind",
       [&](const YAML::Node& n) {
         const std::string k = text(n, "env.kind");
         if (k == "cyber") {
           env.kind = EnvKind::kCyber;
         } else if (k == "tabular") {
           env.kind = EnvKind::kTabular;
         } else {
           fail(n, "env.kind must be 'cyber' or 'tabular', got '" + k + "'");
         }
       }},
      {"hosts",
       [&](const YAML::Node& n) {
         c.num_hosts = integer(n, "env.hosts");
         if (c.num_hosts < 2) fail(n, "env.hosts must be >= 2");
       }},
      {"p_exploit", [&](const YAML::Node& n) { c.p_exploit = probability(n, "env.p_exploit"); }},
      {"p_detect", [&](const YAML::Node& n) { c.p_detect = probability(n, "env.p_detect"); }},
      {"episode_length",
       [&](const YAML::Node& n) { env.episode_length = positive_int(n, "env.episode_length"); }},
      {"weights", [&](const YAML::Node& n) { walk(n, "env.weights", weights); }},
      {"game",
       [&](const YAML::Node& n) {
         std::filesystem::path p = text(n, "env.game");
         if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
         env.game = p.lexically_normal().string();
       }},
  };
  walk(node, "env", h);
  c.episode_length = env.episode_length;
}

void parse_eval(const YAML::Node& node, EvalSection& e) {
  Handlers h{
      {"episodes",
       [&](const YAML::Node& n) {
         e.episodes = integer(n, "eval.episodes");
         if (e.episodes < 2) fail(n, "eval.episodes must be >= 2");
       }},
      {"seed", [&](const YAML::Node& n) { e.seed = scalar<std::uint64_t>(n, "eval.seed", "an unsigned integer"); }},
      {"greedy", [&](const YAML::Node& n) { e.greedy = boolean(n, "eval.greedy"); }},
      {"trace", [&](const YAML::Node& n) { e.trace = boolean(n, "eval.trace"); }},
      {"blue",
       [&](const YAML::Node& n) {
         const std::string b = text(n, "eval.blue");
         if (b == "network") {
           e.blue = EvalBlue::kNetwork;
         } else if (b == "sleep") {
           e.blue = EvalBlue::kSleep;
         } else if (b == "restore_on_alert") {
           e.blue = EvalBlue::kRestoreOnAlert;
         } else {
           fail(n, "eval.blue must be network, sleep or restore_on_alert, got '" + b + "'");
         }
       }},
  };
  walk(node, "eval", h);
}

std::string blue_name(EvalBlue b) {
  switch (b) {
    case EvalBlue::kNetwork: return "network";
    case EvalBlue::kSleep: return "sleep";
    case EvalBlue::kRestoreOnAlert: return "restore_on_alert";
  }
  return "network";
}

}  // namespace

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kTrain: return "train";
    case Mode::kEval: return "eval";
    case Mode::kVerify: return "verify";
  }
  return "train";
}

void RunConfig::validate() const {
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (train.episode_length != env.episode_length) {
    throw ConfigError("train episode length and env.episode_length disagree");
  }
  if (env.kind == EnvKind::kTabular && env.game.empty()) {
    throw ConfigError("env.kind is tabular but env.game is not set");
  }
  try {
    train.validate();
    env.cyber.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const std::string& text_in, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text_in);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("line " + std::to_string(e.mark.line + 1) + ": parse error: " + e.msg);
  }
  RunConfig c;
  Handlers h{
      {"mode",
       [&](const YAML::Node& n) {
         const std::string m = text(n, "mode");
         if (m == "train") {
           c.mode = Mode::kTrain;
         } else if (m == "eval") {
           c.mode = Mode::kEval;
         } else if (m == "verify") {
           c.mode = Mode::kVerify;
         } else {
           fail(n, "mode must be train, eval or verify, got '" + m + "'");
         }
       }},
      {"train", [&](const YAML::Node& n) { parse_train(n, c.train); }},
      {"env", [&](const YAML::Node& n) { parse_env(n, c.env, base_dir); }},
      {"eval", [&](const YAML::Node& n) { parse_eval(n, c.eval); }},
      {"output_dir", [&](const YAML::Node& n) { c.output_dir = text(n, "output_dir"); }},
      {"checkpoint_in", [&](const YAML::Node& n) { c.checkpoint_in = text(n, "checkpoint_in"); }},
      {"checkpoint_out", [&](const YAML::Node& n) { c.checkpoint_out = text(n, "checkpoint_out"); }},
      {"epochs",
       [&](const YAML::Node& n) {
         c.epochs = integer(n, "epochs");
         if (c.epochs < 0) fail(n, "epochs must be >= 0");
       }},
      {"checkpoint_every",
       [&](const YAML::Node& n) {
         c.checkpoint_every = integer(n, "checkpoint_every");
         if (c.checkpoint_every < 0) fail(n, "checkpoint_every must be >= 0");
       }},
  };
  walk(root, "", h);
  c.train.episode_length = c.env.episode_length;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string contents;
  try {
    contents = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("cannot read config " + path.string() + ": " + e.what());
  }
  try {
    return parse_config(contents, path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string write_config(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << mode_name(c.mode);
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  if (!c.checkpoint_in.empty()) out << YAML::Key << "checkpoint_in" << YAML::Value << c.checkpoint_in;
  if (!c.checkpoint_out.empty()) out << YAML::Key << "checkpoint_out" << YAML::Value << c.checkpoint_out;
  out << YAML::Key << "epochs" << YAML::Value << c.epochs;
  out << YAML::Key << "checkpoint_every" << YAML::Value << c.checkpoint_every;

  const auto& t = c.train;
  out << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "discount" << YAML::Value << t.discount;
  out << YAML::Key << "critic_epochs" << YAML::Value << t.critic_epochs;
  out << YAML::Key << "rollout_horizon" << YAML::Value << t.rollout_horizon;
  out << YAML::Key << "batch_size" << YAML::Value << t.batch_size;
  out << YAML::Key << "policy_lr" << YAML::Value << t.policy_lr;
  out << YAML::Key << "critic_lr" << YAML::Value << t.critic_lr;
  out << YAML::Key << "adam_betas" << YAML::Value << YAML::Flow << YAML::BeginSeq << t.adam_beta1
      << t.adam_beta2 << YAML::EndSeq;
  out << YAML::Key << "adam_eps" << YAML::Value << t.adam_eps;
  out << YAML::Key << "huber_delta" << YAML::Value << t.huber_delta;
  out << YAML::Key << "num_workers" << YAML::Value << t.num_workers;
  out << YAML::Key << "episodes_per_epoch" << YAML::Value << t.episodes_per_epoch;
  out << YAML::Key << "seed" << YAML::Value << t.seed;
  out << YAML::Key << "policy_hidden" << YAML::Value << YAML::Flow << t.policy_hidden;
  out << YAML::Key << "critic_hidden" << YAML::Value << YAML::Flow << t.critic_hidden;
  out << YAML::Key << "bootstrap_on_truncation" << YAML::Value << t.bootstrap_on_truncation;
  out << YAML::Key << "frozen_targets" << YAML::Value << t.frozen_targets;
  out << YAML::EndMap;

  const auto& e = c.env;
  out << YAML::Key << "env" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << (e.kind == EnvKind::kCyber ? "cyber" : "tabular");
  out << YAML::Key << "episode_length" << YAML::Value << e.episode_length;
  out << YAML::Key << "hosts" << YAML::Value << e.cyber.num_hosts;
  out << YAML::Key << "p_exploit" << YAML::Value << e.cyber.p_exploit;
  out << YAML::Key << "p_detect" << YAML::Value << e.cyber.p_detect;
  out << YAML::Key << "weights" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "exploited" << YAML::Value << e.cyber.weights.exploited;
  out << YAML::Key << "privileged" << YAML::Value << e.cyber.weights.privileged;
  out << YAML::Key << "impact" << YAML::Value << e.cyber.weights.impact;
  out << YAML::Key << "restore_cost" << YAML::Value << e.cyber.weights.restore_cost;
  out << YAML::Key << "block_cost" << YAML::Value << e.cyber.weights.block_cost;
  out << YAML::EndMap;
  if (!e.game.empty()) out << YAML::Key << "game" << YAML::Value << e.game;
  out << YAML::EndMap;

  const auto& v = c.eval;
  out << YAML::Key << "eval" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "episodes" << YAML::Value << v.episodes;
  out << YAML::Key << "seed" << YAML::Value << v.seed;
  out << YAML::Key << "greedy" << YAML::Value << v.greedy;
  out << YAML::Key << "blue" << YAML::Value << blue_name(v.blue);
  out << YAML::Key << "trace" << YAML::Value << v.trace;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

EnvFactory make_env_factory(const RunConfig& config) {
  if (config.env.kind == EnvKind::kCyber) {
    cyber::CyberConfig cc = config.env.cyber;
    cc.episode_length = config.env.episode_length;
    const double discount = config.train.discount;
    return [cc, discount] { return std::make_unique<cyber::CyberEnv>(cc, discount); };
  }
  auto game = std::make_shared<const tabular::TabularGame>(tabular::load_tabular_game(config.env.game));
  const int len = config.env.episode_length;
  return [game, len] { return std::make_unique<tabular::TabularEnv>(*game, len); };
}

}  // namespace nashq::cli
