#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nashq/matrix_nash.hpp"
#include "oracles/oracles.hpp"

using namespace nashq;
using Eigen::MatrixXd;

namespace {

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

void check_probs(const MixedStrategy& s, std::vector<double> expected, double tol = 1e-12) {
  REQUIRE(s.probs.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(s.probs[i] - expected[i]) <= tol);
}

}  // namespace

TEST_CASE("solve_zero_sum: matching pennies") {
  const auto eq = solve_zero_sum(PayoffMatrix::unmasked(mat({{1, -1}, {-1, 1}})));
  check_probs(eq.blue, {0.5, 0.5});
  check_probs(eq.red, {0.5, 0.5});
  CHECK(std::abs(eq.value) <= 1e-12);
}

TEST_CASE("solve_zero_sum: rock-paper-scissors") {
  const auto eq = solve_zero_sum(PayoffMatrix::unmasked(mat({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}})));
  check_probs(eq.blue, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  check_probs(eq.red, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(std::abs(eq.value) <= 1e-12);
}

TEST_CASE("solve_zero_sum: [[0,2],[3,1]]") {
  // Indifference: Blue p*0 + (1-p)*3 = 2p + (1-p) -> p = 1/2; Red q*0 + (1-q)*2 = 3q + (1-q) -> q = 1/4.
  const auto eq = solve_zero_sum(PayoffMatrix::unmasked(mat({{0, 2}, {3, 1}})));
  check_probs(eq.blue, {0.5, 0.5});
  check_probs(eq.red, {0.25, 0.75});
  CHECK(eq.value == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("solve_zero_sum: 1x1") {
  const auto eq = solve_zero_sum(PayoffMatrix::unmasked(mat({{-4.25}})));
  check_probs(eq.blue, {1.0});
  check_probs(eq.red, {1.0});
  CHECK(eq.value == doctest::Approx(-4.25).epsilon(1e-14));
}

TEST_CASE("solve_zero_sum: errors") {
  PayoffMatrix g = PayoffMatrix::unmasked(mat({{1, 2}, {3, 4}}));
  g.row_mask = {0, 0};
  CHECK_THROWS_AS(solve_zero_sum(g), std::invalid_argument);
  g = PayoffMatrix::unmasked(mat({{1, 2}, {3, 4}}));
  g.col_mask = {0, 0};
  CHECK_THROWS_AS(solve_zero_sum(g), std::invalid_argument);
  g = PayoffMatrix::unmasked(mat({{1, std::numeric_limits<double>::quiet_NaN()}, {3, 4}}));
  CHECK_THROWS_AS(solve_zero_sum(g), std::invalid_argument);
  g = PayoffMatrix::unmasked(mat({{1, std::numeric_limits<double>::infinity()}, {3, 4}}));
  CHECK_THROWS_AS(solve_zero_sum(g), std::invalid_argument);
}

TEST_CASE("solve_zero_sum: masked actions are removed and get exactly zero") {
  // Without the mask Blue would play row 2 (dominant).
  PayoffMatrix g = PayoffMatrix::unmasked(mat({{1, -1}, {-1, 1}, {9, 9}}));
  g.row_mask = {1, 1, 0};
  const auto eq = solve_zero_sum(g);
  check_probs(eq.blue, {0.5, 0.5, 0.0}, 1e-12);
  CHECK(eq.blue.probs[2] == 0.0);
  CHECK(std::abs(eq.value) <= 1e-12);
  CHECK(saddle_check(g, eq, 1e-9).pass);
}

TEST_CASE("support_enumeration examples") {
  const auto mp = support_enumeration(PayoffMatrix::unmasked(mat({{1, -1}, {-1, 1}})));
  CHECK(std::abs(mp.value) <= 1e-12);
  check_probs(mp.blue, {0.5, 0.5});
  const auto g = PayoffMatrix::unmasked(mat({{0, 2}, {3, 1}}));
  CHECK(std::abs(support_enumeration(g).value - 1.5) <= 1e-12);
  const auto c = PayoffMatrix::unmasked(mat({{5, 5}, {5, 5}}));
  const auto ce = support_enumeration(c);
  CHECK(ce.value == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(saddle_check(c, ce, 1e-9).pass);
}

TEST_CASE("support_enumeration rejects oversized games") {
  const auto g = PayoffMatrix::unmasked(MatrixXd::Zero(7, 3));
  CHECK_THROWS_AS(support_enumeration(g), UnsupportedSizeError);
  // Masking brings it under the cap.
  PayoffMatrix m = g;
  m.row_mask = {1, 1, 1, 1, 1, 1, 0};
  CHECK_NOTHROW(support_enumeration(m));
}

TEST_CASE("saddle_check examples") {
  const auto mp = PayoffMatrix::unmasked(mat({{1, -1}, {-1, 1}}));
  StageEquilibrium eq{{{1.0, 0.0}, {1, 1}}, {{0.5, 0.5}, {1, 1}}, 0.0};
  const auto rep = saddle_check(mp, eq, 1e-6);
  CHECK(rep.max_row_deviation == doctest::Approx(0.0));
  CHECK(rep.max_col_deviation == doctest::Approx(1.0));
  CHECK_FALSE(rep.pass);

  const auto c = PayoffMatrix::unmasked(mat({{2, 2, 2}, {2, 2, 2}}));
  StageEquilibrium any{{{0.3, 0.7}, {1, 1}}, {{0.1, 0.2, 0.7}, {1, 1, 1}}, 2.0};
  const auto rc = saddle_check(c, any, 1e-12);
  CHECK(rc.max_row_deviation == doctest::Approx(0.0));
  CHECK(rc.max_col_deviation == doctest::Approx(0.0));
  CHECK(rc.pass);
}

TEST_CASE("random matrices: saddle, value agreement, antisymmetry, affine maps") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 200; ++k) {
    const int r = 2 + static_cast<int>(rng() % 5);
    const int c = 2 + static_cast<int>(rng() % 5);
    const MatrixXd a = oracle::random_matrix(rng, r, c, -10, 10);
    const auto g = PayoffMatrix::unmasked(a);
    const auto eq = solve_zero_sum(g);
    CHECK(eq.blue.is_valid());
    CHECK(eq.red.is_valid());
    CHECK(saddle_check(g, eq, 1e-6).pass);
    if (r <= 4 && c <= 4) CHECK(std::abs(eq.value - support_enumeration(g).value) <= 1e-8);

    const MatrixXd neg_t = -a.transpose();
    CHECK(std::abs(solve_zero_sum(PayoffMatrix::unmasked(neg_t)).value + eq.value) <= 1e-8);

    const double alpha = oracle::uniform(rng, 0.1, 5);
    const double shift = oracle::uniform(rng, -50, 50);
    const MatrixXd b = (alpha * a).array() + shift;
    const auto eb = solve_zero_sum(PayoffMatrix::unmasked(b));
    CHECK(std::abs(eb.value - (alpha * eq.value + shift)) <= 1e-7);
    StageEquilibrium back{eb.blue, eb.red, eq.value};
    CHECK(saddle_check(g, back, 1e-6).pass);
  }
}

TEST_CASE("random masks: masked entries exactly zero, saddle on the unmasked game") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 300; ++k) {
    const int r = 1 + static_cast<int>(rng() % 21);
    const int c = 1 + static_cast<int>(rng() % 21);
    PayoffMatrix g = PayoffMatrix::unmasked(oracle::random_matrix(rng, r, c, -10, 10));
    for (auto& m : g.row_mask) m = rng() % 3 != 0;
    for (auto& m : g.col_mask) m = rng() % 3 != 0;
    g.row_mask[rng() % static_cast<unsigned>(r)] = 1;
    g.col_mask[rng() % static_cast<unsigned>(c)] = 1;
    const auto eq = solve_zero_sum(g);
    for (int i = 0; i < r; ++i) {
      if (g.row_mask[static_cast<std::size_t>(i)] == 0) CHECK(eq.blue.probs[static_cast<std::size_t>(i)] == 0.0);
    }
    for (int j = 0; j < c; ++j) {
      if (g.col_mask[static_cast<std::size_t>(j)] == 0) CHECK(eq.red.probs[static_cast<std::size_t>(j)] == 0.0);
    }
    CHECK(eq.blue.is_valid());
    CHECK(eq.red.is_valid());
    CHECK(saddle_check(g, eq, 1e-6).pass);
  }
}

TEST_CASE("solve_zero_sum is deterministic") {
  std::mt19937_64 rng(5);
  const auto g = PayoffMatrix::unmasked(oracle::random_matrix(rng, 21, 21, -3, 3));
  const auto a = solve_zero_sum(g);
  const auto b = solve_zero_sum(g);
  CHECK(a.blue.probs == b.blue.probs);
  CHECK(a.red.probs == b.red.probs);
  CHECK(a.value == b.value);
}
