#include "nashq/matrix_nash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace nashq {
namespace {

constexpr double kPivotEps = 1e-12;

std::vector<int> valid_indices(const ActionMask& mask) {
  std::vector<int> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& m, const std::vector<int>& rows,
                         const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

// Clips round-off negatives and rescales onto the simplex, then scatters the
// reduced strategy back to full length (masked entries stay exactly 0).
MixedStrategy expand(const Eigen::VectorXd& reduced, const std::vector<int>& index,
                     const ActionMask& mask) {
  Eigen::VectorXd p = reduced.cwiseMax(0.0);
  const double total = p.sum();
  if (total > 0.0) {
    p /= total;
  } else {
    p.setConstant(1.0 / static_cast<double>(p.size()));
  }
  MixedStrategy s;
  s.mask = mask;
  s.probs.assign(mask.size(), 0.0);
  for (std::size_t k = 0; k < index.size(); ++k) s.probs[index[k]] = p(k);
  return s;
}

struct SimplexResult {
  Eigen::VectorXd primal;  // y, one entry per column of A
  Eigen::VectorXd dual;    // x, one entry per row of A
  double objective = 0.0;  // 1'y
};

// Dense tableau simplex for max 1'y s.t. A y <= 1, y >= 0 with A > 0.
// The slack basis is feasible at the origin so no phase one is needed and
// positivity of A rules out unboundedness. Bland's rule prevents cycling.
SimplexResult solve_packing_lp(const Eigen::MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  const int width = n + m + 1;  // decision vars, slacks, rhs
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, width);
  tab.topLeftCorner(m, n) = a;
  tab.block(0, n, m, m).setIdentity();
  tab.col(width - 1).head(m).setOnes();
  tab.row(m).head(n).setConstant(-1.0);

  std::vector<int> basis(m);
  std::iota(basis.begin(), basis.end(), n);

  const int max_pivots = 50 * (m + n) + 1000;
  for (int iter = 0; iter < max_pivots; ++iter) {
    int enter = -1;
    for (int j = 0; j < n + m; ++j) {
      if (tab(m, j) < -kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double coef = tab(i, enter);
      if (coef <= kPivotEps) continue;
      const double ratio = tab(i, width - 1) / coef;
      if (ratio < best_ratio - kPivotEps ||
          (std::abs(ratio - best_ratio) <= kPivotEps && leave >= 0 &&
           basis[i] < basis[leave])) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) {
      throw std::runtime_error("solve_zero_sum: LP unbounded (non-positive payoff column)");
    }

    tab.row(leave) /= tab(leave, enter);
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double f = tab(i, enter);
      if (f != 0.0) tab.row(i) -= f * tab.row(leave);
    }
    basis[leave] = enter;
  }

  SimplexResult r;
  r.primal = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) r.primal(basis[i]) = tab(i, width - 1);
  }
  r.dual = tab.row(m).segment(n, m).transpose();
  r.objective = tab(m, width - 1);
  return r;
}

// Solves the bordered indifference system [M -1; 1' 0][p; v] = [0; 1].
// Returns false when the system is singular.
bool solve_indifference(const Eigen::MatrixXd& m, Eigen::VectorXd& strategy,
                        double& value) {
  const Eigen::Index k = m.rows();
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(k + 1, k + 1);
  sys.topLeftCorner(k, k) = m;
  sys.topRightCorner(k, 1).setConstant(-1.0);
  sys.bottomLeftCorner(1, k).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd sol = lu.solve(rhs);
  strategy = sol.head(k);
  value = sol(k);
  return true;
}

// Advances `idx` to the next k-subset of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

PayoffMatrix PayoffMatrix::unmasked(Eigen::MatrixXd values) {
  PayoffMatrix g;
  g.row_mask.assign(values.rows(), 1);
  g.col_mask.assign(values.cols(), 1);
  g.values = std::move(values);
  return g;
}

void PayoffMatrix::validate() const {
  if (values.rows() < 1 || values.cols() < 1) {
    throw std::invalid_argument("PayoffMatrix: empty matrix");
  }
  if (row_mask.size() != static_cast<std::size_t>(values.rows()) ||
      col_mask.size() != static_cast<std::size_t>(values.cols())) {
    throw std::invalid_argument("PayoffMatrix: mask length does not match matrix shape");
  }
  if (!values.allFinite()) {
    throw std::invalid_argument("PayoffMatrix: non-finite entry");
  }
  if (count_valid(row_mask) == 0 || count_valid(col_mask) == 0) {
    throw std::invalid_argument("PayoffMatrix: every row or every column is masked");
  }
}

StageEquilibrium solve_zero_sum(const PayoffMatrix& game) {
  game.validate();
  const auto rows = valid_indices(game.row_mask);
  const auto cols = valid_indices(game.col_mask);
  Eigen::MatrixXd a = restrict(game.values, rows, cols);

  const double shift = 1.0 - a.minCoeff();
  a.array() += shift;

  const SimplexResult lp = solve_packing_lp(a);
  StageEquilibrium eq;
  eq.red = expand(lp.primal / lp.objective, cols, game.col_mask);
  eq.blue = expand(lp.dual / lp.objective, rows, game.row_mask);
  eq.value = 1.0 / lp.objective - shift;
  return eq;
}

StageEquilibrium support_enumeration(const PayoffMatrix& game) {
  game.validate();
  const auto rows = valid_indices(game.row_mask);
  const auto cols = valid_indices(game.col_mask);
  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(cols.size());
  if (m > kSupportEnumerationMaxDim || n > kSupportEnumerationMaxDim) {
    throw UnsupportedSizeError("support_enumeration: unmasked game is " +
                               std::to_string(m) + "x" + std::to_string(n) +
                               ", limit is " +
                               std::to_string(kSupportEnumerationMaxDim));
  }
  const Eigen::MatrixXd a = restrict(game.values, rows, cols);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * scale;

  for (int k = 1; k <= std::min(m, n); ++k) {
    std::vector<int> row_set(k);
    std::iota(row_set.begin(), row_set.end(), 0);
    do {
      std::vector<int> col_set(k);
      std::iota(col_set.begin(), col_set.end(), 0);
      do {
        const Eigen::MatrixXd sub = restrict(a, row_set, col_set);
        Eigen::VectorXd p, q;
        double v_row = 0.0, v_col = 0.0;
        // Blue mixes so every support column yields v; Red mixes so every
        // support row yields v.
        if (!solve_indifference(sub.transpose(), p, v_row)) continue;
        if (!solve_indifference(sub, q, v_col)) continue;
        if (p.minCoeff() < -tol || q.minCoeff() < -tol) continue;
        if (std::abs(v_row - v_col) > tol) continue;

        Eigen::VectorXd blue_full = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd red_full = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < k; ++i) blue_full(row_set[i]) = p(i);
        for (int j = 0; j < k; ++j) red_full(col_set[j]) = q(j);
        const double v = v_row;
        if ((a * red_full).maxCoeff() > v + tol) continue;
        if ((blue_full.transpose() * a).minCoeff() < v - tol) continue;

        StageEquilibrium eq;
        eq.blue = expand(blue_full, rows, game.row_mask);
        eq.red = expand(red_full, cols, game.col_mask);
        eq.value = v;
        return eq;
      } while (next_combination(col_set, n));
    } while (next_combination(row_set, m));
  }
  throw std::runtime_error("support_enumeration: no equilibrium found");
}

SaddleReport saddle_check(const PayoffMatrix& game, const StageEquilibrium& eq,
                          double tol) {
  const Eigen::Index m = game.values.rows();
  const Eigen::Index n = game.values.cols();
  SaddleReport report;
  if (eq.blue.probs.size() != static_cast<std::size_t>(m) ||
      eq.red.probs.size() != static_cast<std::size_t>(n) ||
      game.row_mask.size() != static_cast<std::size_t>(m) ||
      game.col_mask.size() != static_cast<std::size_t>(n)) {
    report.max_row_deviation = std::numeric_limits<double>::infinity();
    report.max_col_deviation = std::numeric_limits<double>::infinity();
    return report;
  }
  const Eigen::Map<const Eigen::VectorXd> sigma_b(eq.blue.probs.data(), m);
  const Eigen::Map<const Eigen::VectorXd> sigma_r(eq.red.probs.data(), n);
  const Eigen::VectorXd row_payoff = game.values * sigma_r;
  const Eigen::VectorXd col_payoff = game.values.transpose() * sigma_b;

  report.max_row_deviation = -std::numeric_limits<double>::infinity();
  report.max_col_deviation = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    if (game.row_mask[i] == 0) continue;
    report.max_row_deviation = std::max(report.max_row_deviation, row_payoff(i) - eq.value);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (game.col_mask[j] == 0) continue;
    report.max_col_deviation = std::max(report.max_col_deviation, eq.value - col_payoff(j));
  }
  report.pass = report.max_row_deviation <= tol && report.max_col_deviation <= tol;
  return report;
}

}  // namespace nashq
