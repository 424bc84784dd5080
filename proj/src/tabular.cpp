#include "nashq/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <yaml-cpp/yaml.h>

namespace nashq::tabular {

void TabularGame::validate() const {
  if (payoff.empty()) throw std::invalid_argument("TabularGame: no states");
  if (num_blue_actions < 1 || num_red_actions < 1) {
    throw std::invalid_argument("TabularGame: action counts must be >= 1");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw std::invalid_argument("TabularGame: discount must lie in [0, 1)");
  }
  if (initial_state < 0 || initial_state >= num_states()) {
    throw std::invalid_argument("TabularGame: initial_state out of range");
  }
  if (transition.size() != payoff.size()) {
    throw std::invalid_argument("TabularGame: transition table has wrong state count");
  }
  const auto joint = static_cast<std::size_t>(num_blue_actions * num_red_actions);
  for (int s = 0; s < num_states(); ++s) {
    const auto& m = payoff[s];
    if (m.rows() != num_blue_actions || m.cols() != num_red_actions) {
      throw std::invalid_argument("TabularGame: payoff shape mismatch at state " +
                                  std::to_string(s));
    }
    if (!m.allFinite()) {
      throw std::invalid_argument("TabularGame: non-finite payoff at state " + std::to_string(s));
    }
    if (transition[s].size() != joint) {
      throw std::invalid_argument("TabularGame: transition rows missing at state " +
                                  std::to_string(s));
    }
    for (const auto& row : transition[s]) {
      if (row.size() != payoff.size()) {
        throw std::invalid_argument("TabularGame: transition row length mismatch at state " +
                                    std::to_string(s));
      }
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) {
          throw std::invalid_argument("TabularGame: negative transition probability");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("TabularGame: transition row at state " +
                                    std::to_string(s) + " sums to " + std::to_string(total));
      }
    }
  }
}

QTable QTable::zeros(const TabularGame& game) {
  QTable q;
  q.values.assign(game.payoff.size(),
                  Eigen::MatrixXd::Zero(game.num_blue_actions, game.num_red_actions));
  return q;
}

Eigen::MatrixXd stage_matrix(const TabularGame& game, const std::vector<double>& values,
                             int s) {
  Eigen::MatrixXd m = game.payoff[s];
  for (int b = 0; b < game.num_blue_actions; ++b) {
    for (int r = 0; r < game.num_red_actions; ++r) {
      const auto& dist = game.next_distribution(s, b, r);
      double continuation = 0.0;
      for (std::size_t next = 0; next < dist.size(); ++next) {
        continuation += dist[next] * values[next];
      }
      m(b, r) += game.discount * continuation;
    }
  }
  return m;
}

QTable q_from_values(const TabularGame& game, const std::vector<double>& values) {
  QTable q;
  for (int s = 0; s < game.num_states(); ++s) q.values.push_back(stage_matrix(game, values, s));
  return q;
}

ShapleyResult shapley_value_iteration(const TabularGame& game, double tol, int max_iters) {
  game.validate();
  const auto n = static_cast<std::size_t>(game.num_states());
  ShapleyResult result;
  std::vector<double> v(n, 0.0);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<double> next(n);
    std::vector<StageEquilibrium> eqs;
    eqs.reserve(n);
    double residual = 0.0;
    for (int s = 0; s < game.num_states(); ++s) {
      eqs.push_back(solve_zero_sum(PayoffMatrix::unmasked(stage_matrix(game, v, s))));
      next[s] = eqs.back().value;
      residual = std::max(residual, std::abs(next[s] - v[s]));
    }
    v = std::move(next);
    result.residuals.push_back(residual);
    if (residual < tol) {
      // Equilibria reported at the returned V.
      result.equilibria.clear();
      for (int s = 0; s < game.num_states(); ++s) {
        result.equilibria.push_back(
            solve_zero_sum(PayoffMatrix::unmasked(stage_matrix(game, v, s))));
      }
      result.value.values = std::move(v);
      return result;
    }
  }
  const double last = result.residuals.empty() ? 0.0 : result.residuals.back();
  throw NonConvergenceError("shapley_value_iteration: no convergence after " +
                                std::to_string(max_iters) + " iterations (residual " +
                                std::to_string(last) + ")",
                            last);
}

double nash_value(const QTable& q, int s) {
  return solve_zero_sum(PayoffMatrix::unmasked(q.values.at(static_cast<std::size_t>(s)))).value;
}

QTable nashq_update(QTable q, int s, int a_b, int a_r, double reward, int s_next,
                    double alpha, double discount) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("nashq_update: alpha must lie in (0, 1], got " +
                                std::to_string(alpha));
  }
  const int n = static_cast<int>(q.values.size());
  if (s < 0 || s >= n || s_next < 0 || s_next >= n) {
    throw std::invalid_argument("nashq_update: state index out of range");
  }
  auto& entry_matrix = q.values[s];
  if (a_b < 0 || a_b >= entry_matrix.rows() || a_r < 0 || a_r >= entry_matrix.cols()) {
    throw std::invalid_argument("nashq_update: action index out of range");
  }
  const double target = reward + discount * nash_value(q, s_next);
  double& entry = entry_matrix(a_b, a_r);
  entry = (1.0 - alpha) * entry + alpha * target;
  return q;
}

double default_alpha(std::int64_t visits) { return 1.0 / (1.0 + static_cast<double>(visits)); }

TabularRunResult run_tabular(const TabularGame& game, const TabularRunConfig& config) {
  game.validate();
  if (!(config.exploration >= 0.0 && config.exploration <= 1.0)) {
    throw std::invalid_argument("run_tabular: exploration must lie in [0, 1]");
  }
  std::mt19937_64 rng(config.seed);
  TabularRunResult result;
  result.q = QTable::zeros(game);
  std::vector<Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>> visits(
      game.payoff.size(),
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(
          game.num_blue_actions, game.num_red_actions));

  auto explore = [&](const std::vector<double>& eq_probs) {
    std::vector<double> p(eq_probs.size());
    const double uniform = 1.0 / static_cast<double>(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = (1.0 - config.exploration) * eq_probs[i] + config.exploration * uniform;
    }
    return sample_index(p, unit_draw(rng));
  };

  for (int episode = 0; episode < config.episodes; ++episode) {
    int s = game.initial_state;
    for (int t = 0; t < config.episode_length; ++t) {
      const StageEquilibrium eq = solve_zero_sum(PayoffMatrix::unmasked(result.q.values[s]));
      const int a_b = explore(eq.blue.probs);
      const int a_r = explore(eq.red.probs);
      const int s_next = sample_index(game.next_distribution(s, a_b, a_r), unit_draw(rng));
      const double alpha = config.alpha(visits[s](a_b, a_r)++);
      result.q = nashq_update(std::move(result.q), s, a_b, a_r, game.payoff[s](a_b, a_r),
                              s_next, alpha, game.discount);
      ++result.updates;
      s = s_next;
    }
  }
  for (int st = 0; st < game.num_states(); ++st) {
    result.value.values.push_back(nash_value(result.q, st));
  }
  return result;
}

namespace {

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& msg) {
  const auto mark = node.Mark();
  throw std::invalid_argument("line " + std::to_string(mark.line + 1) + ": " + msg);
}

Eigen::MatrixXd parse_matrix(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() == 0) fail_at(node, what + " must be a non-empty list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  const auto cols = static_cast<Eigen::Index>(node[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const YAML::Node row = node[static_cast<std::size_t>(r)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail_at(row, what + " rows must all have " + std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      try {
        m(r, c) = row[static_cast<std::size_t>(c)].as<double>();
      } catch (const YAML::Exception&) {
        fail_at(row[static_cast<std::size_t>(c)], what + " entry is not a number");
      }
    }
  }
  return m;
}

}  // namespace

TabularGame parse_tabular_game(const YAML::Node& node) {
  if (!node.IsMap()) fail_at(node, "game must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (key != "name" && key != "discount" && key != "initial_state" && key != "states") {
      fail_at(kv.first, "unknown game key '" + key + "'");
    }
  }
  TabularGame game;
  if (node["name"]) game.name = node["name"].as<std::string>();
  if (node["discount"]) game.discount = node["discount"].as<double>();
  if (node["initial_state"]) game.initial_state = node["initial_state"].as<int>();
  const YAML::Node states = node["states"];
  if (!states || !states.IsSequence() || states.size() == 0) {
    fail_at(node, "game needs a non-empty 'states' list");
  }
  for (const auto& st : states) {
    for (const auto& kv : st) {
      const auto key = kv.first.as<std::string>();
      if (key != "payoff" && key != "transitions") fail_at(kv.first, "unknown state key '" + key + "'");
    }
    if (!st["payoff"] || !st["transitions"]) fail_at(st, "state needs 'payoff' and 'transitions'");
    Eigen::MatrixXd pay = parse_matrix(st["payoff"], "payoff");
    if (game.payoff.empty()) {
      game.num_blue_actions = static_cast<int>(pay.rows());
      game.num_red_actions = static_cast<int>(pay.cols());
    } else if (pay.rows() != game.num_blue_actions || pay.cols() != game.num_red_actions) {
      fail_at(st["payoff"], "payoff shape differs from the first state");
    }
    const YAML::Node trans = st["transitions"];
    if (!trans.IsSequence() || static_cast<int>(trans.size()) != game.num_blue_actions) {
      fail_at(trans, "transitions must have one entry per Blue action");
    }
    std::vector<std::vector<double>> rows;
    for (const auto& per_blue : trans) {
      if (!per_blue.IsSequence() || static_cast<int>(per_blue.size()) != game.num_red_actions) {
        fail_at(per_blue, "transitions[a_B] must have one distribution per Red action");
      }
      for (const auto& dist : per_blue) {
        try {
          rows.push_back(dist.as<std::vector<double>>());
        } catch (const YAML::Exception&) {
          fail_at(dist, "transition distribution must be a list of numbers");
        }
      }
    }
    game.payoff.push_back(std::move(pay));
    game.transition.push_back(std::move(rows));
  }
  try {
    game.validate();
  } catch (const std::invalid_argument& e) {
    fail_at(node, e.what());
  }
  return game;
}

TabularGame load_tabular_game(const std::filesystem::path& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw std::invalid_argument(path.string() + ": cannot open game file");
  } catch (const YAML::ParserException& e) {
    throw std::invalid_argument(path.string() + ": line " + std::to_string(e.mark.line + 1) +
                                ": " + e.msg);
  }
  try {
    return parse_tabular_game(root);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

TabularEnv::TabularEnv(TabularGame game, int episode_length)
    : game_(std::move(game)), episode_length_(episode_length) {
  game_.validate();
  if (episode_length_ < 1) throw std::invalid_argument("TabularEnv: episode_length must be >= 1");
  spec_.num_blue_actions = game_.num_blue_actions;
  spec_.num_red_actions = game_.num_red_actions;
  spec_.blue_obs_dim = game_.num_states();
  spec_.red_obs_dim = game_.num_states();
  spec_.discount = game_.discount;
  spec_.validate();
  state_ = game_.initial_state;
}

std::vector<double> TabularEnv::observe(int s) const {
  std::vector<double> obs(static_cast<std::size_t>(game_.num_states()), 0.0);
  obs[static_cast<std::size_t>(s)] = 1.0;
  return obs;
}

StepOutcome TabularEnv::outcome(double reward, bool done) const {
  StepOutcome out;
  out.blue_obs = observe(state_);
  out.red_obs = out.blue_obs;
  out.blue_mask.assign(static_cast<std::size_t>(game_.num_blue_actions), 1);
  out.red_mask.assign(static_cast<std::size_t>(game_.num_red_actions), 1);
  out.blue_reward = reward;
  out.done = done;
  out.truncated = done;
  return out;
}

StepOutcome TabularEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  state_ = game_.initial_state;
  t_ = 0;
  return outcome(0.0, false);
}

StepOutcome TabularEnv::step(JointAction action) {
  if (action.blue < 0 || action.blue >= game_.num_blue_actions || action.red < 0 ||
      action.red >= game_.num_red_actions) {
    throw ContractViolation("TabularEnv: action out of range");
  }
  if (t_ >= episode_length_) throw ContractViolation("TabularEnv: episode already finished");
  const double reward = game_.payoff[state_](action.blue, action.red);
  state_ = sample_index(game_.next_distribution(state_, action.blue, action.red), unit_draw(rng_));
  ++t_;
  return outcome(reward, t_ >= episode_length_);
}

int TabularEnv::blue_category(int action) const {
  return std::min(action, static_cast<int>(kNumActionCategories) - 1);
}

int TabularEnv::red_category(int action) const {
  return std::min(action, static_cast<int>(kNumActionCategories) - 1);
}

std::string TabularEnv::blue_action_name(int action) const { return "b" + std::to_string(action); }
std::string TabularEnv::red_action_name(int action) const { return "r" + std::to_string(action); }

}  // namespace nashq::tabular
