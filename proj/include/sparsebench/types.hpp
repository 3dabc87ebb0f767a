#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sparsebench {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexList = std::vector<int>;  // column indices, kept sorted ascending

/// A regression problem: predictor matrix X (n x p) and response Y (n).
struct Dataset {
  Matrix X;
  Vector Y;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const {
    if (X.rows() < 1 || X.cols() < 1)
      throw std::invalid_argument("Dataset: need n >= 1 and p >= 1");
    if (Y.size() != X.rows())
      throw std::invalid_argument("Dataset: Y length must match rows of X");
    if (!X.allFinite() || !Y.allFinite())
      throw std::invalid_argument("Dataset: non-finite entries");
  }
};

/// Thrown when an iterative solver hits its iteration cap. Carries the last
/// iterate and the residual of the optimality condition at that point.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Vector last_iterate,
                   double residual)
      : std::runtime_error(what),
        last_iterate(std::move(last_iterate)),
        kkt_residual(residual) {}

  Vector last_iterate;
  double kkt_residual;
};

inline int count_nonzeros(const Vector& beta) {
  int c = 0;
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0) ++c;
  return c;
}

inline IndexList support_of(const Vector& beta) {
  IndexList s;
  for (Eigen::Index i = 0; i < beta.size(); ++i)
    if (beta[i] != 0.0) s.push_back(static_cast<int>(i));
  return s;
}

}  // namespace sparsebench
