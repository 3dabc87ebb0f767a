#include "sparsebench/stepwise.hpp"

#include <cmath>
#include <stdexcept>

namespace sparsebench::stepwise {

QrState::QrState(const Matrix& x, int kmax, const StepwiseOptions& opts)
    : x_(x), opts_(opts) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (kmax < 1 || kmax > std::min(n, p))
    throw std::invalid_argument("QrState: kmax must lie in [1, min(n,p)]");
  q_.setZero(n, kmax);
  r_.setZero(kmax, p);
  z_ = x;
  position_.assign(p, -1);
  col_norms_.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) col_norms_[j] = x.col(j).norm();
}

bool QrState::is_viable(int column) const {
  return position_[column] < 0 &&
         z_.col(column).norm() > opts_.collinearity_rtol * col_norms_[column];
}

bool QrState::insert(int column) {
  if (position_[column] >= 0)
    throw std::invalid_argument("QrState::insert: column already active");
  if (k_ >= q_.cols())
    throw std::logic_error("QrState::insert: factorization is full");
  const double norm = z_.col(column).norm();
  if (norm <= opts_.collinearity_rtol * col_norms_[column]) return false;

  q_.col(k_) = z_.col(column) / norm;
  r_(k_, column) = norm;
  // One MGS pass of the new direction over every remaining column.
  for (Eigen::Index c = 0; c < z_.cols(); ++c) {
    if (position_[c] >= 0 || c == column) continue;
    const double proj = q_.col(k_).dot(z_.col(c));
    r_(k_, c) = proj;
    z_.col(c) -= proj * q_.col(k_);
  }
  z_.col(column).setZero();
  position_[column] = k_;
  order_.push_back(column);
  ++k_;
  return true;
}

Matrix QrState::r() const {
  Matrix out = Matrix::Zero(k_, k_);
  for (int step = 0; step < k_; ++step)
    out.col(step).head(step + 1) = r_.block(0, order_[step], step + 1, 1);
  return out;
}

Vector QrState::solve(const Vector& y) const {
  const Vector qty = q_.leftCols(k_).transpose() * y;
  Matrix rk = r();
  const Vector coef =
      rk.triangularView<Eigen::Upper>().solve(qty);
  Vector beta = Vector::Zero(x_.cols());
  for (int step = 0; step < k_; ++step) beta[order_[step]] = coef[step];
  return beta;
}

StepwisePath fs_path(const Matrix& x, const Vector& y, int kmax,
                     const StepwiseOptions& opts) {
  const Eigen::Index p = x.cols();
  QrState state(x, kmax, opts);

  StepwisePath path;
  path.betas.push_back(Vector::Zero(p));
  path.rss.push_back(y.squaredNorm());

  Vector y_perp = y;
  Vector scores(p);
  for (int step = 0; step < kmax; ++step) {
    double max_score = -1.0;
    scores.setConstant(-1.0);
    for (Eigen::Index j = 0; j < p; ++j) {
      const int jc = static_cast<int>(j);
      if (state.is_active(jc)) continue;
      const double norm = state.residual_norm(jc);
      if (norm <= opts.collinearity_rtol * x.col(j).norm()) continue;
      scores[j] =
          std::abs(state.residual_columns().col(j).dot(y_perp)) / norm;
      max_score = std::max(max_score, scores[j]);
    }
    // Scores equal up to roundoff count as tied; the lowest index wins.
    // Ties arise when the projected candidates all explain the same residual
    // direction (duplicated columns, or the interpolation step of a p > n
    // path, where the scores are mathematically identical).
    int best_j = -1;
    if (max_score >= 0.0) {
      const double slack = 1e-10 * std::max(max_score, y.norm());
      const double cutoff = max_score - slack;
      for (Eigen::Index j = 0; j < p; ++j) {
        if (scores[j] >= 0.0 && scores[j] >= cutoff) {
          best_j = static_cast<int>(j);
          break;
        }
      }
    }
    const double best_score = best_j >= 0 ? scores[best_j] : -1.0;
    if (best_j < 0 || !state.insert(best_j)) {
      path.truncated = true;
      break;
    }
    const auto q_new = state.q_col(state.size() - 1);
    y_perp -= q_new.dot(y_perp) * q_new;

    path.order.push_back(best_j);
    path.scores.push_back(best_score);
    path.betas.push_back(state.solve(y));
    path.rss.push_back(y_perp.squaredNorm());
  }
  return path;
}

}  // namespace sparsebench::stepwise
