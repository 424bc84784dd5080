#include <doctest.h>

#include <cmath>
#include <random>

#include <yaml-cpp/yaml.h>

#include "nashq/tabular.hpp"

using namespace nashq;
using namespace nashq::tabular;
using Eigen::MatrixXd;

namespace {

std::string fixture(const char* name) { return std::string(NASHQ_SOURCE_DIR) + "/fixtures/" + name; }

TabularGame single_state(const MatrixXd& m, double discount) {
  TabularGame g;
  g.name = "single";
  g.num_blue_actions = static_cast<int>(m.rows());
  g.num_red_actions = static_cast<int>(m.cols());
  g.discount = discount;
  g.payoff = {m};
  g.transition = {std::vector<std::vector<double>>(static_cast<std::size_t>(m.size()), {1.0})};
  return g;
}

MatrixXd m22(double a, double b, double c, double d) {
  MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("Shapley: matching pennies has value 0 for any discount") {
  for (double g : {0.0, 0.5, 0.9, 0.99}) {
    const auto res = shapley_value_iteration(single_state(m22(1, -1, -1, 1), g), 1e-12, 10000);
    CHECK(std::abs(res.value.values[0]) <= 1e-12);
  }
}

TEST_CASE("Shapley: single state fixed point val(M) / (1 - gamma)") {
  const auto res = shapley_value_iteration(single_state(m22(0, 2, 3, 1), 0.5), 1e-13, 1000);
  CHECK(res.value.values[0] == doctest::Approx(3.0).epsilon(1e-11));
  CHECK(res.equilibria[0].blue.probs[0] == doctest::Approx(0.5));
  CHECK(res.equilibria[0].red.probs[0] == doctest::Approx(0.25));
}

TEST_CASE("Shapley: swap fixture is antisymmetric with V(s0) = 1.5 / (1 + gamma)") {
  const auto g = load_tabular_game(fixture("swap_game.yaml"));
  const auto res = shapley_value_iteration(g, 1e-13, 1000);
  CHECK(res.value.values[0] == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(res.value.values[1] == doctest::Approx(-1.0).epsilon(1e-11));
  CHECK(std::abs(res.value.values[0] + res.value.values[1]) <= 1e-11);
}

TEST_CASE("Shapley: residuals contract and non-convergence is reported") {
  const auto g = load_tabular_game(fixture("chain3.yaml"));
  const auto res = shapley_value_iteration(g, 1e-12, 1000);
  for (std::size_t k = 1; k < res.residuals.size(); ++k) {
    CHECK(res.residuals[k] <= g.discount * res.residuals[k - 1] + 1e-9);
  }
  try {
    shapley_value_iteration(g, 1e-12, 3);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.residual() > 1e-12);
  }
  double bound = 0;
  for (const auto& p : g.payoff) bound = std::max(bound, p.cwiseAbs().maxCoeff());
  for (double v : res.value.values) CHECK(std::abs(v) <= bound / (1 - g.discount));
}

TEST_CASE("Q built from the oracle V has stage values V") {
  const auto g = load_tabular_game(fixture("chain3.yaml"));
  const auto res = shapley_value_iteration(g, 1e-13, 1000);
  const auto q = q_from_values(g, res.value.values);
  for (int s = 0; s < g.num_states(); ++s) {
    CHECK(std::abs(nash_value(q, s) - res.value.values[static_cast<std::size_t>(s)]) <= 1e-10);
  }
}

TEST_CASE("nashq_update examples and errors") {
  const auto g = load_tabular_game(fixture("swap_game.yaml"));
  auto q = QTable::zeros(g);
  q = nashq_update(q, 0, 1, 0, 3.0, 1, 1.0, g.discount);
  CHECK(q.values[0](1, 0) == 3.0);
  CHECK(q.values[0](0, 0) == 0.0);
  CHECK(q.values[1].isZero(0.0));

  QTable r = QTable::zeros(g);
  r.values[1] = m22(0, 2, 3, 1);  // NashVal = 1.5
  r = nashq_update(r, 0, 0, 1, -1.0, 1, 1.0, 0.5);
  CHECK(r.values[0](0, 1) == doctest::Approx(-1.0 + 0.5 * 1.5).epsilon(1e-14));

  CHECK_THROWS_AS(nashq_update(q, 0, 0, 0, 0, 0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(nashq_update(q, 0, 0, 0, 0, 0, 1.5, 0.5), std::invalid_argument);
  CHECK_THROWS(nashq_update(q, 0, 5, 0, 0, 0, 0.5, 0.5));
}

TEST_CASE("expected-target sweeps converge to the Shapley-consistent Q") {
  const auto g = load_tabular_game(fixture("chain3.yaml"));
  const auto oracle_res = shapley_value_iteration(g, 1e-14, 2000);
  const auto q_star = q_from_values(g, oracle_res.value.values);
  // Sweep every entry with alpha = 1 against the exact expected continuation.
  auto q = QTable::zeros(g);
  for (int sweep = 0; sweep < 200; ++sweep) {
    std::vector<double> v;
    for (int s = 0; s < g.num_states(); ++s) v.push_back(nash_value(q, s));
    QTable next = q;
    for (int s = 0; s < g.num_states(); ++s) {
      for (int b = 0; b < g.num_blue_actions; ++b) {
        for (int r = 0; r < g.num_red_actions; ++r) {
          const auto& dist = g.next_distribution(s, b, r);
          double cont = 0;
          for (std::size_t sp = 0; sp < dist.size(); ++sp) cont += dist[sp] * v[sp];
          next.values[static_cast<std::size_t>(s)](b, r) = g.payoff[static_cast<std::size_t>(s)](b, r) + g.discount * cont;
        }
      }
    }
    q = next;
  }
  for (int s = 0; s < g.num_states(); ++s) {
    CHECK((q.values[static_cast<std::size_t>(s)] - q_star.values[static_cast<std::size_t>(s)]).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("role swap negates V") {
  const auto g = load_tabular_game(fixture("chain3.yaml"));
  TabularGame sw = g;
  for (int s = 0; s < g.num_states(); ++s) {
    const auto su = static_cast<std::size_t>(s);
    sw.payoff[su] = -g.payoff[su].transpose();
    for (int b = 0; b < 2; ++b) {
      for (int r = 0; r < 2; ++r) sw.transition[su][static_cast<std::size_t>(r * 2 + b)] = g.transition[su][static_cast<std::size_t>(b * 2 + r)];
    }
  }
  const auto a = shapley_value_iteration(g, 1e-14, 2000);
  const auto b = shapley_value_iteration(sw, 1e-14, 2000);
  for (std::size_t s = 0; s < 3; ++s) CHECK(std::abs(a.value.values[s] + b.value.values[s]) <= 1e-12);
}

TEST_CASE("run_tabular: matching pennies with 1/k steps") {
  const auto g = load_tabular_game(fixture("matching_pennies.yaml"));
  TabularRunConfig cfg;
  cfg.episodes = 200;
  cfg.episode_length = 50;  // 10 000 updates
  cfg.seed = 1;
  const auto res = run_tabular(g, cfg);
  CHECK(res.updates == 10000);
  CHECK(std::abs(res.value.values[0]) < 0.05);
}

TEST_CASE("run_tabular: uniform exploration still converges") {
  const auto g = load_tabular_game(fixture("swap_game.yaml"));
  const auto oracle_res = shapley_value_iteration(g, 1e-12, 1000);
  TabularRunConfig cfg;
  cfg.exploration = 1.0;
  cfg.episodes = 400;
  cfg.seed = 3;
  const auto res = run_tabular(g, cfg);
  for (std::size_t s = 0; s < 2; ++s) CHECK(std::abs(res.value.values[s] - oracle_res.value.values[s]) < 0.05);
  cfg.exploration = 1.5;
  CHECK_THROWS_AS(run_tabular(g, cfg), std::invalid_argument);
}

TEST_CASE("game parsing diagnostics") {
  CHECK_THROWS_WITH_AS(parse_tabular_game(YAML::Load("name: x\nbogus: 1\nstates: []\n")),
                       doctest::Contains("line 2"), std::invalid_argument);
  const char* bad_rows =
      "discount: 0.5\n"
      "states:\n"
      "  - payoff: [[1]]\n"
      "    transitions:\n"
      "      - [[0.5, 0.4]]\n";
  CHECK_THROWS_AS(parse_tabular_game(YAML::Load(bad_rows)), std::invalid_argument);
  CHECK_THROWS(load_tabular_game(fixture("does_not_exist.yaml")));
  for (const char* f : {"matching_pennies.yaml", "swap_game.yaml", "chain3.yaml"}) {
    CHECK_NOTHROW(load_tabular_game(fixture(f)).validate());
  }
}

TEST_CASE("TabularEnv: one-hot observations, horizon truncation, deterministic swap") {
  const auto g = load_tabular_game(fixture("swap_game.yaml"));
  TabularEnv env(g, 3);
  auto o = env.reset(0);
  CHECK(o.blue_obs == std::vector<double>{1, 0});
  o = env.step({0, 1});
  CHECK(o.blue_reward == 2.0);
  CHECK(o.blue_obs == std::vector<double>{0, 1});
  o = env.step({1, 0});
  CHECK(o.blue_reward == -2.0);
  CHECK_FALSE(o.done);
  o = env.step({0, 0});
  CHECK(o.done);
  CHECK(o.truncated);
  CHECK_THROWS(env.step({0, 0}));
}
