#pragma once

#include <optional>
#include <vector>

#include "sparsebench/types.hpp"

namespace sparsebench::lasso {

/// All solvers minimize f(beta) = 0.5*||Y - X beta||^2 + lambda*||beta||_1,
/// so lambda_max = ||X'Y||_inf is the smallest penalty with an all-zero
/// solution and the active-set stationarity condition X_A'(Y - X beta) =
/// lambda * sign(beta_A) holds without extra factors.

struct LassoOptions {
  // Max coordinate change per full sweep, scaled by (1+||beta||_inf). Tight
  // enough that the active-set stationarity gap stays below 1e-6 even for
  // unstandardized designs with a few hundred rows.
  double tol = 1e-11;
  long max_sweeps = 100000;
  int check_interval = 1000;  // sweeps between fresh residual recomputations
};

struct LambdaGrid {
  Vector values;
  bool degenerate = false;  // X'Y == 0; grid collapses to {0}
};

/// m log-spaced penalties from lambda_max = ||X'Y||_inf down to
/// eps*lambda_max.
LambdaGrid lambda_grid(const Matrix& x, const Vector& y, int m, double eps);

struct KktReport {
  double max_violation = 0.0;   // max_j max(|X_j'r| - lambda, 0)
  double max_active_gap = 0.0;  // max over active j of |sign(b_j) X_j'r - lambda|

  bool ok(double lambda, double tol_inactive = 1e-7,
          double tol_active = 1e-6) const {
    return max_violation <= tol_inactive * (1.0 + lambda) &&
           max_active_gap <= tol_active;
  }
};

KktReport kkt_check(const Matrix& x, const Vector& y, const Vector& beta,
                    double lambda);

/// Cyclic coordinate descent with active-set iteration between full sweeps.
/// Throws ConvergenceError (carrying the last iterate and its KKT residual)
/// if the sweep cap is reached.
Vector lasso_fit(const Matrix& x, const Vector& y, double lambda,
                 const std::optional<Vector>& warm = std::nullopt,
                 const LassoOptions& opts = {});

struct LassoPath {
  Vector lambdas;                  // strictly decreasing
  std::vector<Vector> betas;       // one coefficient vector per lambda
  std::vector<IndexList> supports; // nonzero indices per lambda
  bool degenerate_grid = false;
};

/// Solves along a decreasing grid, warm-starting each fit from the previous.
LassoPath lasso_path(const Matrix& x, const Vector& y, const Vector& grid,
                     const LassoOptions& opts = {});

/// Least squares of Y on the active columns, zero-padded to length p.
/// Rank-deficient submatrices get the minimum-norm solution.
Vector active_least_squares(const Matrix& x, const IndexList& active,
                            const Vector& y);

struct RelaxedPath {
  LassoPath base;
  Vector gammas;                    // from 1 down to 0
  std::vector<Matrix> betas;        // betas[i] is p x gammas.size() at lambda i
  std::vector<Vector> ls_betas;     // active-set least squares per lambda
};

/// Blend gamma*lasso + (1-gamma)*active-set least squares per grid point.
/// gammas must lie in [0,1] and contain both endpoints.
RelaxedPath relaxed_path(const Matrix& x, const Vector& y,
                         const LassoPath& base, const Vector& gammas);

/// 10 equally spaced blend weights from 1 down to 0.
Vector default_gammas();

/// Penalized objective 0.5*||Y - X beta||^2 + lambda*||beta||_1.
double objective(const Matrix& x, const Vector& y, const Vector& beta,
                 double lambda);

}  // namespace sparsebench::lasso
