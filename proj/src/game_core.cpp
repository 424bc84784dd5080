#include "nashq/game_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nashq {

void MarkovGameSpec::validate() const {
  if (num_blue_actions < 1 || num_red_actions < 1) {
    throw std::invalid_argument("MarkovGameSpec: action counts must be >= 1");
  }
  if (blue_obs_dim < 1 || red_obs_dim < 1) {
    throw std::invalid_argument("MarkovGameSpec: observation dims must be >= 1");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("MarkovGameSpec: discount must lie in [0, 1)");
  }
}

bool MixedStrategy::is_valid(double tol) const {
  if (probs.size() != mask.size() || probs.empty()) return false;
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) return false;
    if (mask[i] == 0 && probs[i] != 0.0) return false;
    sum += probs[i];
  }
  return std::abs(sum - 1.0) <= tol;
}

std::size_t count_valid(const ActionMask& mask) {
  std::size_t n = 0;
  for (auto m : mask) n += (m != 0);
  return n;
}

double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) continue;
    cumulative += probs[i];
    last_positive = static_cast<int>(i);
    if (u < cumulative) return last_positive;
  }
  if (last_positive < 0) {
    throw std::invalid_argument("sample_index: no positive probability");
  }
  return last_positive;
}

double discounted_return(std::span<const double> rewards, double discount) {
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("discounted_return: discount must lie in [0, 1), got " +
                                std::to_string(discount));
  }
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= discount;
  }
  return total;
}

EpisodeMetrics metrics_update(EpisodeMetrics metrics, int blue_category,
                              int red_category, double blue_reward,
                              bool red_action_is_impact, bool impact_succeeded) {
  if (impact_succeeded && !red_action_is_impact) {
    throw std::invalid_argument(
        "metrics_update: impact success reported for a non-impact action");
  }
  const auto in_range = [](int c) {
    return c >= 0 && static_cast<std::size_t>(c) < kNumActionCategories;
  };
  if (!in_range(blue_category) || !in_range(red_category)) {
    throw std::invalid_argument("metrics_update: action category out of range");
  }

  const double prev_reward =
      metrics.cumulative_reward.empty() ? 0.0 : metrics.cumulative_reward.back();
  const std::int64_t prev_attempts =
      metrics.attack_attempts.empty() ? 0 : metrics.attack_attempts.back();
  const std::int64_t prev_impacts =
      metrics.successful_impacts.empty() ? 0 : metrics.successful_impacts.back();

  metrics.cumulative_reward.push_back(prev_reward + blue_reward);
  metrics.attack_attempts.push_back(prev_attempts + (red_action_is_impact ? 1 : 0));
  metrics.successful_impacts.push_back(prev_impacts + (impact_succeeded ? 1 : 0));
  ++metrics.blue_action_counts[static_cast<std::size_t>(blue_category)];
  ++metrics.red_action_counts[static_cast<std::size_t>(red_category)];
  return metrics;
}

AggregateStats aggregate_series(const std::vector<std::vector<double>>& episodes) {
  if (episodes.size() < 2) {
    throw std::invalid_argument("aggregate_series: need at least 2 series, got " +
                                std::to_string(episodes.size()));
  }
  const std::size_t len = episodes.front().size();
  for (const auto& e : episodes) {
    if (e.size() != len) {
      throw std::invalid_argument("aggregate_series: ragged series lengths");
    }
  }

  const double n = static_cast<double>(episodes.size());
  AggregateStats stats;
  stats.n = episodes.size();
  stats.mean.assign(len, 0.0);
  stats.std.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    // Shifted by the first sample: identical series give exactly zero spread.
    const double pivot = episodes.front()[t];
    double shifted = 0.0;
    for (const auto& e : episodes) shifted += e[t] - pivot;
    const double mean = pivot + shifted / n;
    double sq = 0.0;
    for (const auto& e : episodes) {
      const double d = e[t] - mean;
      sq += d * d;
    }
    stats.mean[t] = mean;
    stats.std[t] = std::sqrt(sq / (n - 1.0));
  }
  return stats;
}

}  // namespace nashq
