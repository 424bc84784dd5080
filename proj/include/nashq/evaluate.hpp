#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nashq/cyber_env.hpp"
#include "nashq/game_core.hpp"
#include "nashq/neural.hpp"

namespace nashq::eval {

/// Blue decision rule for evaluation: observation and mask in, action out.
/// The generator is the episode's actor stream.
using BlueActor =
    std::function<int(const std::vector<double>& obs, const ActionMask& mask, std::mt19937_64& rng)>;

/// Samples from (or, when `greedy`, takes the argmax of) the policy network.
BlueActor network_actor(neural::NetworkParams params, bool greedy = false);
/// Always Sleep.
BlueActor sleep_actor();
/// Restore the lowest-index host whose alert is raised, otherwise Sleep.
BlueActor restore_on_alert_actor(const cyber::CyberConfig& config);

struct EvalConfig {
  int episodes = 64;
  std::uint64_t seed = 0;
};

using CategoryFreq = std::array<double, kNumActionCategories>;

struct EvalResult {
  AggregateStats reward;                  // cumulative Blue reward per t
  std::vector<EpisodeMetrics> episodes;
  std::vector<double> mean_attempts;      // per t
  std::vector<double> mean_impacts;       // per t
  std::vector<CategoryFreq> blue_freq;    // per t, share of episodes
  std::vector<CategoryFreq> red_freq;
};

/// Runs `config.episodes` episodes of `actor` against the B-line attacker.
/// Episode e resets the environment and the actor stream from two draws of
/// a generator seeded with `config.seed`. Requires at least two episodes.
EvalResult evaluate(const BlueActor& actor, const cyber::CyberConfig& env,
                    const EvalConfig& config);

/// One episode against B-line, one trace_line per step.
std::vector<std::string> trace_episode(const BlueActor& actor, const cyber::CyberConfig& env,
                                       std::uint64_t seed);

}  // namespace nashq::eval
