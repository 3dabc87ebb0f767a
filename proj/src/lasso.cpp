#include "sparsebench/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace sparsebench::lasso {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

}  // namespace

LambdaGrid lambda_grid(const Matrix& x, const Vector& y, int m, double eps) {
  if (x.rows() == 0 || x.cols() == 0 || y.size() == 0)
    throw std::invalid_argument("lambda_grid: empty data");
  if (m < 2) throw std::invalid_argument("lambda_grid: need m >= 2");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("lambda_grid: eps must lie in (0,1)");
  // Per-column dots, the same kernel the coordinate updates use, so the
  // all-zero solution at lambda_max holds bit-exactly.
  double lmax = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    lmax = std::max(lmax, std::abs(x.col(j).dot(y)));
  LambdaGrid grid;
  if (lmax == 0.0) {
    grid.values = Vector::Zero(1);
    grid.degenerate = true;
    return grid;
  }
  grid.values.resize(m);
  for (int i = 0; i < m; ++i)
    grid.values[i] = lmax * std::pow(eps, static_cast<double>(i) / (m - 1));
  return grid;
}

KktReport kkt_check(const Matrix& x, const Vector& y, const Vector& beta,
                    double lambda) {
  const Vector r = y - x * beta;
  const Vector g = x.transpose() * r;
  KktReport rep;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    rep.max_violation = std::max(rep.max_violation, std::abs(g[j]) - lambda);
    if (beta[j] != 0.0) {
      const double s = beta[j] > 0.0 ? 1.0 : -1.0;
      rep.max_active_gap =
          std::max(rep.max_active_gap, std::abs(s * g[j] - lambda));
    }
  }
  rep.max_violation = std::max(rep.max_violation, 0.0);
  return rep;
}

double objective(const Matrix& x, const Vector& y, const Vector& beta,
                 double lambda) {
  return 0.5 * (y - x * beta).squaredNorm() + lambda * beta.lpNorm<1>();
}

namespace {

struct CdWork {
  const Matrix& x;
  const Vector& y;
  Vector col_sq;  // per-column squared norms

  CdWork(const Matrix& x_, const Vector& y_) : x(x_), y(y_) {
    col_sq = x.colwise().squaredNorm().transpose();
  }

  // One pass over the given coordinates; returns max coefficient change.
  double sweep(Vector& beta, Vector& resid, double lambda,
               const std::vector<int>* subset) const {
    const Eigen::Index p = x.cols();
    double max_delta = 0.0;
    const Eigen::Index count = subset ? static_cast<Eigen::Index>(subset->size()) : p;
    for (Eigen::Index idx = 0; idx < count; ++idx) {
      const Eigen::Index j = subset ? (*subset)[idx] : idx;
      if (col_sq[j] == 0.0) continue;
      const double bj = beta[j];
      const double z = x.col(j).dot(resid) + col_sq[j] * bj;
      const double bj_new = soft_threshold(z, lambda) / col_sq[j];
      if (bj_new != bj) {
        resid -= (bj_new - bj) * x.col(j);
        beta[j] = bj_new;
        max_delta = std::max(max_delta, std::abs(bj_new - bj));
      }
    }
    return max_delta;
  }
};

}  // namespace

Vector lasso_fit(const Matrix& x, const Vector& y, double lambda,
                 const std::optional<Vector>& warm, const LassoOptions& opts) {
  if (lambda < 0.0) throw std::invalid_argument("lasso_fit: lambda must be >= 0");
  const Eigen::Index p = x.cols();
  Vector beta = warm ? *warm : Vector::Zero(p);
  if (beta.size() != p)
    throw std::invalid_argument("lasso_fit: warm start has wrong length");

  CdWork work(x, y);
  Vector resid = y - x * beta;
  long sweeps = 0;
  long next_check = opts.check_interval;
  while (sweeps < opts.max_sweeps) {
    const double tol = opts.tol * (1.0 + beta.lpNorm<Eigen::Infinity>());
    const double delta = work.sweep(beta, resid, lambda, nullptr);
    ++sweeps;
    if (delta <= tol) return beta;

    // Iterate the current support until stable, then re-check all
    // coordinates with the next full sweep.
    std::vector<int> active;
    for (Eigen::Index j = 0; j < p; ++j)
      if (beta[j] != 0.0) active.push_back(static_cast<int>(j));
    while (sweeps < opts.max_sweeps) {
      const double atol = opts.tol * (1.0 + beta.lpNorm<Eigen::Infinity>());
      const double adelta = work.sweep(beta, resid, lambda, &active);
      ++sweeps;
      if (adelta <= atol) break;
      if (sweeps >= next_check) break;
    }
    if (sweeps >= next_check) {
      next_check += opts.check_interval;
      resid = y - x * beta;
      // Degenerate designs (duplicated columns, p >> n at tiny penalties)
      // can stall the coordinate-change criterion while the solution is
      // already stationary; accept once the optimality conditions hold.
      if (kkt_check(x, y, beta, lambda).ok(lambda)) return beta;
    }
  }
  const KktReport rep = kkt_check(x, y, beta, lambda);
  std::ostringstream msg;
  msg << "lasso_fit: no convergence after " << sweeps
      << " sweeps (KKT violation " << rep.max_violation << ")";
  throw ConvergenceError(msg.str(), beta, rep.max_violation);
}

LassoPath lasso_path(const Matrix& x, const Vector& y, const Vector& grid,
                     const LassoOptions& opts) {
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid[i] < grid[i - 1]))
      throw std::invalid_argument("lasso_path: grid must be strictly decreasing");
  LassoPath path;
  path.lambdas = grid;
  path.betas.reserve(grid.size());
  path.supports.reserve(grid.size());
  std::optional<Vector> warm;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    Vector beta;
    try {
      beta = lasso_fit(x, y, grid[i], warm, opts);
    } catch (const ConvergenceError& e) {
      std::ostringstream msg;
      msg << e.what() << " at grid index " << i;
      throw ConvergenceError(msg.str(), e.last_iterate, e.kkt_residual);
    }
    warm = beta;
    path.supports.push_back(support_of(beta));
    path.betas.push_back(std::move(beta));
  }
  return path;
}

Vector active_least_squares(const Matrix& x, const IndexList& active,
                            const Vector& y) {
  if (active.empty())
    throw std::invalid_argument("active_least_squares: empty active set");
  Matrix sub(x.rows(), active.size());
  for (size_t a = 0; a < active.size(); ++a) sub.col(a) = x.col(active[a]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
  const Vector coef = cod.solve(y);
  Vector beta = Vector::Zero(x.cols());
  for (size_t a = 0; a < active.size(); ++a) beta[active[a]] = coef[a];
  return beta;
}

Vector default_gammas() {
  Vector g(10);
  for (int i = 0; i < 10; ++i) g[i] = 1.0 - static_cast<double>(i) / 9.0;
  g[9] = 0.0;
  return g;
}

RelaxedPath relaxed_path(const Matrix& x, const Vector& y,
                         const LassoPath& base, const Vector& gammas) {
  bool has_zero = false, has_one = false;
  for (Eigen::Index i = 0; i < gammas.size(); ++i) {
    if (!(gammas[i] >= 0.0 && gammas[i] <= 1.0))
      throw std::invalid_argument("relaxed_path: gammas must lie in [0,1]");
    has_zero |= gammas[i] == 0.0;
    has_one |= gammas[i] == 1.0;
  }
  if (!has_zero || !has_one)
    throw std::invalid_argument("relaxed_path: gammas must contain 0 and 1");

  RelaxedPath out;
  out.base = base;
  out.gammas = gammas;
  const Eigen::Index p = x.cols();
  out.betas.reserve(base.betas.size());
  out.ls_betas.reserve(base.betas.size());
  for (size_t i = 0; i < base.betas.size(); ++i) {
    const Vector& bl = base.betas[i];
    const Vector ls = base.supports[i].empty()
                          ? Vector(Vector::Zero(p))
                          : active_least_squares(x, base.supports[i], y);
    Matrix blend(p, gammas.size());
    for (Eigen::Index g = 0; g < gammas.size(); ++g)
      blend.col(g) = gammas[g] * bl + (1.0 - gammas[g]) * ls;
    out.betas.push_back(std::move(blend));
    out.ls_betas.push_back(ls);
  }
  return out;
}

}  // namespace sparsebench::lasso
