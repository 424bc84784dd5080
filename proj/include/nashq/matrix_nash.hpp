#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "nashq/game_core.hpp"

namespace nashq {

/// Blue's payoff matrix of a stage game (rows = Blue actions, columns = Red
/// actions). Red's payoff is the negation.
struct PayoffMatrix {
  Eigen::MatrixXd values;
  ActionMask row_mask;
  ActionMask col_mask;

  /// Matrix with every action valid.
  static PayoffMatrix unmasked(Eigen::MatrixXd values);

  int rows() const { return static_cast<int>(values.rows()); }
  int cols() const { return static_cast<int>(values.cols()); }

  /// Throws std::invalid_argument on shape mismatch, non-finite entries, or
  /// an all-masked side.
  void validate() const;
};

struct StageEquilibrium {
  MixedStrategy blue;
  MixedStrategy red;
  double value = 0.0;  // Blue's maximin value
};

struct SaddleReport {
  double max_row_deviation = 0.0;
  double max_col_deviation = 0.0;
  bool pass = false;
};

class UnsupportedSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exact maximin solution of a zero-sum stage game.
///
/// Masked actions are dropped, the remaining submatrix is shifted so its
/// minimum entry is 1, and the column player's LP
///   max 1'y  s.t.  A y <= 1, y >= 0
/// is solved by a dense primal simplex with Bland's rule. Red's strategy is
/// y / 1'y, Blue's comes from the optimal duals, and the value is
/// 1 / 1'y minus the shift. Deterministic for a given input.
StageEquilibrium solve_zero_sum(const PayoffMatrix& game);

/// Largest unmasked dimension accepted by support_enumeration.
inline constexpr int kSupportEnumerationMaxDim = 6;

/// Independent oracle: tries every square support pair (size first, then
/// lexicographic row subset, then lexicographic column subset), solves the
/// indifference systems, and returns the first pair that is an equilibrium.
/// Throws UnsupportedSizeError above kSupportEnumerationMaxDim.
StageEquilibrium support_enumeration(const PayoffMatrix& game);

/// Best-response gaps of `eq` on the unmasked part of `game`:
///   rows: max_i (Q sigma_R)_i - v,   cols: max_j v - (sigma_B' Q)_j.
SaddleReport saddle_check(const PayoffMatrix& game, const StageEquilibrium& eq,
                          double tol);

}  // namespace nashq
