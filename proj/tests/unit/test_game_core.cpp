#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "nashq/game_core.hpp"

using namespace nashq;

TEST_CASE("discounted_return examples") {
  const std::vector<double> ones{1, 1, 1};
  CHECK(discounted_return(ones, 0.5) == doctest::Approx(1.75).epsilon(1e-15));
  CHECK(discounted_return({}, 0.99) == 0.0);
  const std::vector<double> one{-10};
  CHECK(discounted_return(one, 0.99) == -10.0);
}

TEST_CASE("discounted_return rejects discounts outside [0,1)") {
  const std::vector<double> r{1};
  CHECK_THROWS_AS(discounted_return(r, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(discounted_return(r, -0.1), std::invalid_argument);
  CHECK_NOTHROW(discounted_return(r, 0.0));
}

TEST_CASE("discounted_return is bounded by max|r| / (1 - gamma)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 200; ++k) {
    const double gamma = std::uniform_real_distribution<double>(0, 0.99)(rng);
    std::vector<double> r(static_cast<std::size_t>(1 + k % 50));
    for (double& v : r) v = u(rng);
    double mx = 0;
    for (double v : r) mx = std::max(mx, std::abs(v));
    CHECK(std::abs(discounted_return(r, gamma)) <= mx / (1 - gamma) + 1e-12);
  }
}

TEST_CASE("metrics_update examples") {
  EpisodeMetrics m;
  m = metrics_update(m, 0, 0, -1, false, false);
  m = metrics_update(m, 0, 0, -2, false, false);
  CHECK(m.cumulative_reward == std::vector<double>{-1, -3});

  EpisodeMetrics a;
  a.cumulative_reward = {0};
  a.attack_attempts = {3};
  a.successful_impacts = {1};
  a = metrics_update(a, 0, 4, 0, true, true);
  CHECK(a.attack_attempts.back() == 4);
  CHECK(a.successful_impacts.back() == 2);

  EpisodeMetrics b = metrics_update({}, 0, 4, 0, true, false);
  CHECK(b.attack_attempts.back() == 1);
  CHECK(b.successful_impacts.back() == 0);
}

TEST_CASE("metrics_update rejects success without an impact attempt") {
  CHECK_THROWS_AS(metrics_update({}, 0, 0, 0, false, true), std::invalid_argument);
  CHECK_THROWS_AS(metrics_update({}, 5, 0, 0, false, false), std::invalid_argument);
}

TEST_CASE("metrics invariants over random episodes") {
  std::mt19937_64 rng(3);
  for (int ep = 0; ep < 20; ++ep) {
    EpisodeMetrics m;
    double prefix = 0;
    for (int t = 0; t < 50; ++t) {
      const int bc = static_cast<int>(rng() % 5);
      const int rc = static_cast<int>(rng() % 5);
      const bool impact = rc == 4;
      const bool ok = impact && rng() % 2 == 0;
      const double r = -static_cast<double>(rng() % 7) * 0.25;
      m = metrics_update(m, bc, rc, r, impact, ok);
      prefix += r;
      CHECK(m.cumulative_reward.back() == prefix);
    }
    for (std::size_t t = 1; t < m.length(); ++t) {
      CHECK(m.attack_attempts[t] >= m.attack_attempts[t - 1]);
      CHECK(m.successful_impacts[t] >= m.successful_impacts[t - 1]);
      CHECK(m.successful_impacts[t] <= m.attack_attempts[t]);
    }
    std::int64_t nb = 0;
    std::int64_t nr = 0;
    for (auto c : m.blue_action_counts) nb += c;
    for (auto c : m.red_action_counts) nr += c;
    CHECK(nb == 50);
    CHECK(nr == 50);
  }
}

TEST_CASE("aggregate_series examples") {
  auto s = aggregate_series({{1}, {3}});
  CHECK(s.mean[0] == 2.0);
  CHECK(s.std[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(s.n == 2);

  auto c = aggregate_series({{0.1}, {0.1}, {0.1}});
  CHECK(c.mean[0] == 0.1);
  CHECK(c.std[0] == 0.0);

  std::vector<double> ramp;
  for (int t = 0; t < 100; ++t) ramp.push_back(-0.37 * t);
  auto r = aggregate_series(std::vector<std::vector<double>>(64, ramp));
  CHECK(r.n == 64);
  CHECK(r.mean == ramp);
  for (double v : r.std) CHECK(v == 0.0);
}

TEST_CASE("aggregate_series errors") {
  CHECK_THROWS_AS(aggregate_series({{1}}), std::invalid_argument);
  CHECK_THROWS_AS(aggregate_series({{1, 2}, {3}}), std::invalid_argument);
}

TEST_CASE("aggregate_series mean is permutation invariant and std nonnegative") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  std::vector<std::vector<double>> eps(9, std::vector<double>(5));
  for (auto& e : eps) {
    for (double& v : e) v = u(rng);
  }
  const auto a = aggregate_series(eps);
  std::shuffle(eps.begin(), eps.end(), rng);
  const auto b = aggregate_series(eps);
  for (std::size_t t = 0; t < 5; ++t) {
    CHECK(a.mean[t] == doctest::Approx(b.mean[t]).epsilon(1e-13));
    CHECK(a.std[t] >= 0.0);
  }
}

TEST_CASE("red reward is the exact negation") {
  StepOutcome o;
  for (double r : {0.0, -0.1, 12.5, -1e-300}) {
    o.blue_reward = r;
    CHECK(o.blue_reward + o.red_reward() == 0.0);
  }
}

TEST_CASE("sample_index never picks zero-probability entries") {
  const std::vector<double> p{0.0, 0.5, 0.0, 0.5, 0.0};
  for (double u : {0.0, 0.25, 0.5, 0.75, 0.9999999999}) {
    const int i = sample_index(p, u);
    CHECK(p[static_cast<std::size_t>(i)] > 0.0);
  }
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = unit_draw(rng);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("MarkovGameSpec validation") {
  MarkovGameSpec s;
  CHECK_NOTHROW(s.validate());
  s.discount = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.discount = 0.5;
  s.num_red_actions = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
