#pragma once

#include <vector>

#include "sparsebench/types.hpp"

namespace sparsebench::stepwise {

struct StepwiseOptions {
  // Columns whose orthogonalized norm drops below this fraction of their
  // original norm are treated as collinear with the active set.
  double collinearity_rtol = 1e-10;
};

struct StepwisePath {
  std::vector<int> order;       // selected column per step, no repeats
  std::vector<double> scores;   // winning |X_j' Pperp Y| / ||Pperp X_j|| per step
  std::vector<Vector> betas;    // K+1 vectors; betas[0] is the empty model
  std::vector<double> rss;      // K+1 values; rss[0] = ||Y||^2
  bool truncated = false;       // ran out of non-collinear candidates early

  int steps() const { return static_cast<int>(order.size()); }
};

/// Incrementally maintained QR factorization (modified Gram-Schmidt): the
/// active columns' Q/R factors plus orthogonalized copies of the remaining
/// columns, so each selection step costs O(n*(p-k)).
class QrState {
 public:
  QrState(const Matrix& x, int kmax, const StepwiseOptions& opts);

  /// Orthogonalizes everything against column j and appends it to the
  /// factorization. Returns false (state unchanged) when the column is
  /// degenerate: its remaining orthogonal part is below the collinearity
  /// threshold.
  bool insert(int column);

  bool is_active(int column) const { return position_[column] >= 0; }
  bool is_viable(int column) const;
  int size() const { return k_; }

  /// Orthogonalized copy of a remaining column.
  const Matrix& residual_columns() const { return z_; }
  double residual_norm(int column) const { return z_.col(column).norm(); }

  Matrix q() const { return q_.leftCols(k_); }
  Eigen::MatrixXd::ConstColXpr q_col(int i) const { return q_.col(i); }
  Matrix r() const;

  /// Least squares coefficients of y on the active columns (full length p).
  Vector solve(const Vector& y) const;

 private:
  const Matrix& x_;
  StepwiseOptions opts_;
  int k_ = 0;
  Matrix q_;                    // n x kmax, first k_ columns valid
  Matrix r_;                    // kmax x p: r_(i, c) = q_i' X_c accumulated
  Matrix z_;                    // orthogonalized copies of all columns
  std::vector<int> position_;   // column -> step index, or -1
  std::vector<int> order_;
  Vector col_norms_;            // original column norms
};

/// Greedy forward selection: step k adds the column with the largest
/// absolute correlation with the residual after projecting out the active
/// set. Ties break toward the lowest column index. Collinear candidates are
/// skipped; the path truncates early if none survive.
StepwisePath fs_path(const Matrix& x, const Vector& y, int kmax,
                     const StepwiseOptions& opts = {});

}  // namespace sparsebench::stepwise
