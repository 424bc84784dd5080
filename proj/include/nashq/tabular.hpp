#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nashq/environment.hpp"
#include "nashq/matrix_nash.hpp"

namespace YAML {
class Node;
}

namespace nashq::tabular {

/// Fully observed finite zero-sum Markov game.
struct TabularGame {
  std::string name;
  int num_blue_actions = 1;
  int num_red_actions = 1;
  double discount = 0.9;
  int initial_state = 0;
  std::vector<Eigen::MatrixXd> payoff;  // [s](a_B, a_R), Blue's reward
  // [s][a_B * num_red_actions + a_R] -> distribution over next states
  std::vector<std::vector<std::vector<double>>> transition;

  int num_states() const { return static_cast<int>(payoff.size()); }
  const std::vector<double>& next_distribution(int s, int a_b, int a_r) const {
    return transition[s][static_cast<std::size_t>(a_b * num_red_actions + a_r)];
  }
  /// Throws std::invalid_argument on shape errors, non-finite payoffs, or
  /// transition rows that do not sum to 1 within 1e-12.
  void validate() const;
};

struct QTable {
  std::vector<Eigen::MatrixXd> values;  // [s](a_B, a_R), Blue's Nash Q-values

  static QTable zeros(const TabularGame& game);
};

struct ValueTable {
  std::vector<double> values;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ShapleyResult {
  ValueTable value;
  std::vector<StageEquilibrium> equilibria;  // per state, at the returned V
  std::vector<double> residuals;             // sup-norm change per iteration
};

/// r(s, ., .) + discount * sum_s' p(s' | s, ., .) V(s'): the stage game at s
/// induced by continuation values V.
Eigen::MatrixXd stage_matrix(const TabularGame& game, const std::vector<double>& values, int s);

/// Q built from V through the Nash Q-value definition, for every state.
QTable q_from_values(const TabularGame& game, const std::vector<double>& values);

/// Iterates V <- val(stage_matrix(V)) until the sup-norm change drops below
/// `tol`. Throws NonConvergenceError after `max_iters` iterations.
ShapleyResult shapley_value_iteration(const TabularGame& game, double tol, int max_iters);

/// Game value of solve_zero_sum on q.values[s].
double nash_value(const QTable& q, int s);

/// One Nash-Q backup of entry (s, a_B, a_R):
///   q <- (1 - alpha) q + alpha (reward + discount * NashVal(s_next)).
/// alpha must lie in (0, 1].
QTable nashq_update(QTable q, int s, int a_b, int a_r, double reward, int s_next,
                    double alpha, double discount);

/// Learning rate as a function of the number of previous visits to an entry.
using AlphaSchedule = std::function<double(std::int64_t visits)>;

/// 1 / (1 + visits).
double default_alpha(std::int64_t visits);

struct TabularRunConfig {
  int episodes = 200;
  int episode_length = 50;
  double exploration = 0.2;  // probability of a uniform action per agent
  std::uint64_t seed = 0;
  AlphaSchedule alpha = default_alpha;
};

struct TabularRunResult {
  QTable q;
  ValueTable value;
  std::int64_t updates = 0;
};

/// Online Nash-Q learning: each agent plays its equilibrium strategy of the
/// current stage game, mixed with uniform exploration, and every transition
/// is backed up with nashq_update.
TabularRunResult run_tabular(const TabularGame& game, const TabularRunConfig& config);

/// Parses a game from a YAML node (fixture files and the generic-game
/// section of run configs share this schema). Errors carry line numbers.
TabularGame parse_tabular_game(const YAML::Node& node);
TabularGame load_tabular_game(const std::filesystem::path& path);

/// Fixture game as an Environment: both agents observe a one-hot encoding of
/// the state; all actions are always valid; episodes end by truncation after
/// `episode_length` steps.
class TabularEnv final : public Environment {
 public:
  TabularEnv(TabularGame game, int episode_length);

  const MarkovGameSpec& spec() const override { return spec_; }
  StepOutcome reset(std::uint64_t seed) override;
  StepOutcome step(JointAction action) override;

  int blue_category(int action) const override;
  int red_category(int action) const override;
  bool is_impact(int) const override { return false; }
  std::string blue_action_name(int action) const override;
  std::string red_action_name(int action) const override;

  int state() const { return state_; }
  const TabularGame& game() const { return game_; }
  /// One-hot observation of state `s`.
  std::vector<double> observe(int s) const;

 private:
  StepOutcome outcome(double reward, bool done) const;

  TabularGame game_;
  int episode_length_;
  MarkovGameSpec spec_;
  int state_ = 0;
  int t_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace nashq::tabular
