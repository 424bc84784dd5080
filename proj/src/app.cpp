#include "nashq/app.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <system_error>

#include "nashq/checkpoint.hpp"
#include "nashq/io_util.hpp"

namespace nashq::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kBlueCategories[] = {"sleep", "analyse", "restore", "decoy", "block"};
constexpr const char* kRedCategories[] = {"discover", "scan", "exploit", "escalate", "impact"};

std::string category_columns() {
  std::string s;
  for (const char* c : kBlueCategories) s += std::string(",blue_freq_") + c;
  for (const char* c : kRedCategories) s += std::string(",red_freq_") + c;
  return s;
}

template <typename Array>
void append_reals(std::string& line, const Array& values) {
  for (double v : values) line += "," + format_real(v);
}

// Creates the directory and proves a file can be renamed into it.
bool prepare_output_dir(const fs::path& dir, std::ostream& err) {
  try {
    fs::create_directories(dir);
    const fs::path probe = dir / ".write_probe";
    write_file_atomic(probe, "");
    fs::remove(probe);
    return true;
  } catch (const std::exception& e) {
    err << "error: output directory " << dir.string() << " is not writable: " << e.what() << "\n";
    return false;
  }
}

std::string shape_of(const neural::NetworkParams& p) {
  return std::to_string(p.input_dim()) + " -> " + std::to_string(p.output_dim());
}

// Empty when the checkpoint fits the environment, else a diagnostic.
std::string dimension_mismatch(const ModelSet& m, const MarkovGameSpec& spec) {
  std::string msg;
  auto check = [&](const char* name, const neural::NetworkParams& p, int in, int out) {
    if (p.layers.empty()) {
      msg += std::string(name) + " has no layers; ";
    } else if (p.input_dim() != in || p.output_dim() != out) {
      msg += std::string(name) + " is " + shape_of(p) + " but the environment needs " +
             std::to_string(in) + " -> " + std::to_string(out) + "; ";
    }
  };
  check("policy_blue", m.policy_blue, spec.blue_obs_dim, spec.num_blue_actions);
  check("policy_red", m.policy_red, spec.red_obs_dim, spec.num_red_actions);
  check("critic", m.critic, spec.blue_obs_dim + spec.red_obs_dim,
        spec.num_blue_actions * spec.num_red_actions);
  return msg;
}

fs::path final_checkpoint_path(const RunConfig& c) {
  return c.checkpoint_out.empty() ? fs::path(c.output_dir) / "checkpoint.json"
                                  : fs::path(c.checkpoint_out);
}

std::string epoch_checkpoint_name(int epoch) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "checkpoint_epoch%05d.json", epoch);
  return buf;
}

}  // namespace

std::string metrics_header() {
  return "epoch,mean_reward,std_reward,critic_loss,blue_policy_loss,red_policy_loss,"
         "mean_attack_attempts,mean_impacts" +
         category_columns() + "\n";
}

std::string metrics_row(const train::EpochStats& r) {
  std::string line = std::to_string(r.epoch);
  append_reals(line, std::array<double, 7>{r.mean_reward, r.std_reward, r.critic_loss,
                                           r.blue_policy_loss, r.red_policy_loss,
                                           r.mean_attack_attempts, r.mean_impacts});
  append_reals(line, r.blue_action_freq);
  append_reals(line, r.red_action_freq);
  return line + "\n";
}

std::string eval_timeseries_csv(const eval::EvalResult& res) {
  std::string csv = "t,mean_cumulative_reward,std_cumulative_reward,mean_attempts,mean_impacts" +
                    category_columns() + "\n";
  for (std::size_t t = 0; t < res.reward.mean.size(); ++t) {
    std::string line = std::to_string(t);
    append_reals(line, std::array<double, 4>{res.reward.mean[t], res.reward.std[t],
                                             res.mean_attempts[t], res.mean_impacts[t]});
    append_reals(line, res.blue_freq[t]);
    append_reals(line, res.red_freq[t]);
    csv += line + "\n";
  }
  return csv;
}

std::string eval_summary_csv(const eval::EvalResult& res) {
  std::array<double, kNumActionCategories> blue{};
  std::array<double, kNumActionCategories> red{};
  double steps = 0.0;
  for (const auto& ep : res.episodes) {
    for (std::size_t k = 0; k < kNumActionCategories; ++k) {
      blue[k] += static_cast<double>(ep.blue_action_counts[k]);
      red[k] += static_cast<double>(ep.red_action_counts[k]);
    }
    steps += static_cast<double>(ep.length());
  }
  for (std::size_t k = 0; k < kNumActionCategories; ++k) {
    blue[k] /= steps;
    red[k] /= steps;
  }
  std::string csv = "episodes,mean_final_reward,std_final_reward,mean_final_attempts,"
                    "mean_final_impacts" + category_columns() + "\n";
  std::string line = std::to_string(res.reward.n);
  const bool any = !res.reward.mean.empty();
  append_reals(line, std::array<double, 4>{any ? res.reward.mean.back() : 0.0,
                                           any ? res.reward.std.back() : 0.0,
                                           any ? res.mean_attempts.back() : 0.0,
                                           any ? res.mean_impacts.back() : 0.0});
  append_reals(line, blue);
  append_reals(line, red);
  return csv + line + "\n";
}

int run_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path dir = config.output_dir;
  if (!prepare_output_dir(dir, err)) return 2;
  try {
    config.validate();
    write_file_atomic(dir / "config.yaml", write_config(config));
    train::Trainer trainer(make_env_factory(config), config.train);
    if (!config.checkpoint_in.empty()) {
      ModelSet start = read_checkpoint(config.checkpoint_in);
      const std::string bad = dimension_mismatch(start, trainer.spec());
      if (!bad.empty()) {
        err << "error: checkpoint " << config.checkpoint_in << " does not fit: " << bad << "\n";
        return 3;
      }
      trainer.models() = std::move(start);
    }
    const fs::path csv_path = dir / "train_metrics.csv";
    std::string csv = metrics_header();
    write_file_atomic(csv_path, csv);
    const fs::path ckpt_dir = dir / "checkpoints";
    fs::create_directories(ckpt_dir);
    write_checkpoint(ckpt_dir / epoch_checkpoint_name(0), trainer.models());
    for (int e = 1; e <= config.epochs; ++e) {
      train::EpochStats row;
      try {
        row = trainer.run_epoch();
      } catch (const std::exception& ex) {
        err << "error: epoch " << e << ": " << ex.what() << "\n";
        return 1;
      }
      csv += metrics_row(row);
      write_file_atomic(csv_path, csv);
      out << "epoch " << e << " mean_reward " << format_real(row.mean_reward) << " critic_loss "
          << format_real(row.critic_loss) << "\n";
      if (config.checkpoint_every > 0 && e % config.checkpoint_every == 0) {
        write_checkpoint(ckpt_dir / epoch_checkpoint_name(e), trainer.models());
      }
    }
    write_checkpoint(final_checkpoint_path(config), trainer.models());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const fs::path dir = config.output_dir;
  if (config.env.kind != EnvKind::kCyber) {
    err << "error: eval runs against the scripted attacker and needs env.kind: cyber\n";
    return 2;
  }
  if (!prepare_output_dir(dir, err)) return 2;
  try {
    config.validate();
    cyber::CyberConfig env = config.env.cyber;
    env.episode_length = config.env.episode_length;
    eval::BlueActor actor;
    switch (config.eval.blue) {
      case EvalBlue::kSleep: actor = eval::sleep_actor(); break;
      case EvalBlue::kRestoreOnAlert: actor = eval::restore_on_alert_actor(env); break;
      case EvalBlue::kNetwork: {
        if (config.checkpoint_in.empty()) {
          err << "error: eval with blue: network needs checkpoint_in\n";
          return 2;
        }
        ModelSet models = read_checkpoint(config.checkpoint_in);
        const cyber::CyberEnv probe(env, config.train.discount);
        const std::string bad = dimension_mismatch(models, probe.spec());
        if (!bad.empty()) {
          err << "error: checkpoint " << config.checkpoint_in << " does not fit: " << bad << "\n";
          return 3;
        }
        actor = eval::network_actor(std::move(models.policy_blue), config.eval.greedy);
        break;
      }
    }
    const auto result = eval::evaluate(actor, env, {config.eval.episodes, config.eval.seed});
    write_file_atomic(dir / "eval_timeseries.csv", eval_timeseries_csv(result));
    write_file_atomic(dir / "eval_summary.csv", eval_summary_csv(result));
    if (config.eval.trace) {
      std::string trace;
      for (const auto& line : eval::trace_episode(actor, env, config.eval.seed)) trace += line + "\n";
      write_file_atomic(dir / "trace.txt", trace);
    }
    out << "episodes " << result.reward.n << " mean_final_reward "
        << format_real(result.reward.mean.back()) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_verify(const RunConfig& config, std::ostream& out, std::ostream& err,
               const verify::VerifyOptions* override_options) {
  verify::VerifyOptions options;
  options.seed = config.train.seed;
  if (override_options != nullptr) options = *override_options;
  const auto results = verify::run_suites(options);
  out << verify::format_report(results);
  if (verify::all_pass(results)) return 0;
  err << "failing properties:";
  for (const auto& r : results) {
    if (!r.pass) err << " [" << r.suite << "] " << r.name << ";";
  }
  err << "\n";
  return 1;
}

}  // namespace nashq::cli
