#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nashq {

/// Binary validity vector over one agent's action set (1 = valid).
using ActionMask = std::vector<std::uint8_t>;

/// Number of action categories reported per agent in metrics.
inline constexpr std::size_t kNumActionCategories = 5;

/// Static description of a two-player zero-sum Markov game.
///
/// `discount` is the single discount factor of the game (the beta of the
/// general stochastic-game formulation and the gamma of the Markov-game one).
struct MarkovGameSpec {
  int num_blue_actions = 1;
  int num_red_actions = 1;
  int blue_obs_dim = 1;
  int red_obs_dim = 1;
  double discount = 0.99;

  /// Throws std::invalid_argument if any invariant fails.
  void validate() const;
};

/// Probability vector over one agent's actions together with the validity
/// mask it respects. Policies and equilibrium strategies share this type.
struct MixedStrategy {
  std::vector<double> probs;
  ActionMask mask;

  std::size_t size() const { return probs.size(); }
  /// True iff probs >= 0, sums to 1 within `tol`, and masked entries are 0.
  bool is_valid(double tol = 1e-9) const;
};

struct JointAction {
  int blue = 0;
  int red = 0;
};

/// Result of resetting or stepping an environment. Red's reward is never
/// stored: it is always `red_reward()`, the exact negation of `blue_reward`.
struct StepOutcome {
  std::vector<double> blue_obs;
  std::vector<double> red_obs;
  double blue_reward = 0.0;
  ActionMask blue_mask;
  ActionMask red_mask;
  bool done = false;
  // Episode ended by the horizon cutoff rather than an absorbing state.
  bool truncated = false;
  // Impact bookkeeping for the step that produced this outcome.
  bool impact_attempted = false;
  bool impact_succeeded = false;

  double red_reward() const { return -blue_reward; }
};

/// Per-timestep metric series of one episode.
struct EpisodeMetrics {
  std::vector<double> cumulative_reward;
  std::vector<std::int64_t> attack_attempts;
  std::vector<std::int64_t> successful_impacts;
  std::vector<std::int64_t> blue_action_counts =
      std::vector<std::int64_t>(kNumActionCategories, 0);
  std::vector<std::int64_t> red_action_counts =
      std::vector<std::int64_t>(kNumActionCategories, 0);

  std::size_t length() const { return cumulative_reward.size(); }
};

struct AggregateStats {
  std::vector<double> mean;
  std::vector<double> std;
  std::size_t n = 0;
};

/// Number of valid entries in a mask.
std::size_t count_valid(const ActionMask& mask);

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
double unit_draw(std::mt19937_64& rng);

/// Inverse-CDF sample: first index with positive probability whose
/// cumulative mass exceeds `u`. Zero-probability entries are never chosen.
int sample_index(std::span<const double> probs, double u);

/// Sum over t of discount^t * rewards[t].
double discounted_return(std::span<const double> rewards, double discount);

/// Appends one timestep to `metrics`. Categories index the per-agent
/// action-category counters.
///
/// Throws std::invalid_argument when `impact_succeeded` is set without
/// `red_action_is_impact`, or when a category is out of range.
EpisodeMetrics metrics_update(EpisodeMetrics metrics, int blue_category,
                              int red_category, double blue_reward,
                              bool red_action_is_impact, bool impact_succeeded);

/// Per-index mean and sample (N-1) standard deviation over equal-length
/// series. Requires at least two series.
AggregateStats aggregate_series(const std::vector<std::vector<double>>& episodes);

}  // namespace nashq
