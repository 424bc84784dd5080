#include "nashq/evaluate.hpp"

#include <algorithm>
#include <stdexcept>

namespace nashq::eval {
namespace {

struct EpisodeSeeds {
  std::uint64_t env;
  std::uint64_t actor;
};

EpisodeSeeds episode_seeds(std::mt19937_64& master) {
  const std::uint64_t env = master();
  return {env, master()};
}

}  // namespace

BlueActor network_actor(neural::NetworkParams params, bool greedy) {
  return [params = std::move(params), greedy](const std::vector<double>& obs,
                                              const ActionMask& mask, std::mt19937_64& rng) {
    const MixedStrategy pi = neural::policy_forward(params, obs, mask);
    if (greedy) {
      return static_cast<int>(std::max_element(pi.probs.begin(), pi.probs.end()) -
                              pi.probs.begin());
    }
    return sample_index(pi.probs, unit_draw(rng));
  };
}

BlueActor sleep_actor() {
  return [](const std::vector<double>&, const ActionMask&, std::mt19937_64&) { return 0; };
}

BlueActor restore_on_alert_actor(const cyber::CyberConfig& config) {
  return [config](const std::vector<double>& obs, const ActionMask&, std::mt19937_64&) {
    for (int h = 0; h < config.num_hosts; ++h) {
      if (obs[static_cast<std::size_t>(4 * h)] != 0.0) {
        return cyber::blue_index(config, {cyber::BlueKind::kRestore, h});
      }
    }
    return 0;
  };
}

EvalResult evaluate(const BlueActor& actor, const cyber::CyberConfig& env,
                    const EvalConfig& config) {
  if (config.episodes < 2) {
    throw std::invalid_argument("evaluate: need at least 2 episodes for a standard deviation");
  }
  env.validate();
  const auto len = static_cast<std::size_t>(env.episode_length);
  EvalResult result;
  result.mean_attempts.assign(len, 0.0);
  result.mean_impacts.assign(len, 0.0);
  result.blue_freq.assign(len, CategoryFreq{});
  result.red_freq.assign(len, CategoryFreq{});

  std::mt19937_64 master(config.seed);
  cyber::CyberEnv instance(env);
  std::vector<std::vector<double>> rewards;
  for (int e = 0; e < config.episodes; ++e) {
    const EpisodeSeeds seeds = episode_seeds(master);
    std::mt19937_64 actor_rng(seeds.actor);
    StepOutcome current = instance.reset(seeds.env);
    EpisodeMetrics metrics;
    for (std::size_t t = 0; t < len; ++t) {
      const int b = actor(current.blue_obs, current.blue_mask, actor_rng);
      const int r = cyber::bline_policy(env, instance.state());
      StepOutcome next = instance.step({b, r});
      const int bc = instance.blue_category(b);
      const int rc = instance.red_category(r);
      metrics = metrics_update(std::move(metrics), bc, rc, next.blue_reward,
                               next.impact_attempted, next.impact_succeeded);
      result.blue_freq[t][static_cast<std::size_t>(bc)] += 1.0;
      result.red_freq[t][static_cast<std::size_t>(rc)] += 1.0;
      result.mean_attempts[t] += static_cast<double>(metrics.attack_attempts.back());
      result.mean_impacts[t] += static_cast<double>(metrics.successful_impacts.back());
      current = std::move(next);
    }
    rewards.push_back(metrics.cumulative_reward);
    result.episodes.push_back(std::move(metrics));
  }

  const double n = static_cast<double>(config.episodes);
  for (std::size_t t = 0; t < len; ++t) {
    result.mean_attempts[t] /= n;
    result.mean_impacts[t] /= n;
    for (std::size_t k = 0; k < kNumActionCategories; ++k) {
      result.blue_freq[t][k] /= n;
      result.red_freq[t][k] /= n;
    }
  }
  result.reward = aggregate_series(rewards);
  return result;
}

std::vector<std::string> trace_episode(const BlueActor& actor, const cyber::CyberConfig& env,
                                       std::uint64_t seed) {
  std::mt19937_64 master(seed);
  const EpisodeSeeds seeds = episode_seeds(master);
  std::mt19937_64 actor_rng(seeds.actor);
  cyber::CyberEnv instance(env);
  StepOutcome current = instance.reset(seeds.env);
  std::vector<std::string> lines;
  for (int t = 0; t < env.episode_length; ++t) {
    const int b = actor(current.blue_obs, current.blue_mask, actor_rng);
    const int r = cyber::bline_policy(env, instance.state());
    current = instance.step({b, r});
    lines.push_back(cyber::trace_line(env, t, b, r, current.blue_reward, instance.state()));
  }
  return lines;
}

}  // namespace nashq::eval
