#pragma once

// Shared test utilities: random problem instances and small independent
// oracles (dense quadratic forms, exhaustive subset search, naive stepwise).
// Everything here is deliberately brute-force and separate from the library's
// solver paths.

#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "sparsebench/datagen.hpp"
#include "sparsebench/rng.hpp"
#include "sparsebench/types.hpp"

namespace testutil {

using sparsebench::Matrix;
using sparsebench::Vector;

inline Matrix random_matrix(int n, int p, sparsebench::RngStream& s) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = s.normal();
  return x;
}

inline Vector random_vector(int n, sparsebench::RngStream& s) {
  return s.normals(n);
}

/// Gaussian instance with AR(1) predictor correlation and a planted signal.
inline sparsebench::Dataset random_instance(int n, int p, double rho,
                                            double snr,
                                            sparsebench::RngStream& s,
                                            int sparsity = 0,
                                            int beta_type = 2) {
  using namespace sparsebench::datagen;
  const int sp = sparsity > 0 ? sparsity : std::max(2, p / 4);
  ScenarioSpec spec;
  spec.setting = "custom";
  spec.n = n, spec.p = p, spec.s = sp;
  spec.beta_type = beta_type;
  spec.rho = rho;
  spec.snr = snr;
  GroundTruth truth = make_ground_truth(spec);
  return sample_dataset(n, truth, s);
}

/// Least squares on a column subset via normal equations (independent of the
/// library's decomposition-based route). Returns RSS; fills beta if given.
inline double subset_rss(const Matrix& x, const Vector& y,
                         const std::vector<int>& support,
                         Vector* beta_out = nullptr) {
  const int k = static_cast<int>(support.size());
  if (k == 0) {
    if (beta_out) *beta_out = Vector::Zero(x.cols());
    return y.squaredNorm();
  }
  Matrix g(k, k);
  Vector b(k);
  for (int a = 0; a < k; ++a) {
    b[a] = x.col(support[a]).dot(y);
    for (int c = 0; c < k; ++c)
      g(a, c) = x.col(support[a]).dot(x.col(support[c]));
  }
  Vector coef = g.ldlt().solve(b);
  Vector resid = y;
  for (int a = 0; a < k; ++a) resid -= coef[a] * x.col(support[a]);
  if (beta_out) {
    *beta_out = Vector::Zero(x.cols());
    for (int a = 0; a < k; ++a) (*beta_out)[support[a]] = coef[a];
  }
  return resid.squaredNorm();
}

/// Exhaustive best-subset search over all supports of size exactly k.
inline double enumerate_best_rss(const Matrix& x, const Vector& y, int k,
                                 std::vector<int>* best_support = nullptr) {
  const int p = static_cast<int>(x.cols());
  std::vector<int> support(k);
  double best = std::numeric_limits<double>::infinity();
  // odometer over k-combinations of {0..p-1}
  for (int i = 0; i < k; ++i) support[i] = i;
  while (true) {
    const double rss = subset_rss(x, y, support);
    if (rss < best) {
      best = rss;
      if (best_support) *best_support = support;
    }
    int i = k - 1;
    while (i >= 0 && support[i] == p - k + i) --i;
    if (i < 0) break;
    ++support[i];
    for (int j = i + 1; j < k; ++j) support[j] = support[j - 1] + 1;
  }
  return best;
}

/// One forward-selection path computed the slow way: each step re-solves
/// least squares from scratch for every candidate column.
struct NaiveStepwise {
  std::vector<int> order;
  std::vector<Vector> betas;  // betas[k] supported on the first k selections
  std::vector<double> rss;
};

inline NaiveStepwise naive_stepwise(const Matrix& x, const Vector& y,
                                    int kmax) {
  NaiveStepwise out;
  out.betas.push_back(Vector::Zero(x.cols()));
  out.rss.push_back(y.squaredNorm());
  std::vector<int> active;
  const double rss_slack = 1e-13 * y.squaredNorm();
  for (int step = 0; step < kmax; ++step) {
    int best_j = -1;
    double best_rss = std::numeric_limits<double>::infinity();
    // improvements below roundoff scale are ties; the first j wins
    for (int j = 0; j < x.cols(); ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) continue;
      std::vector<int> trial = active;
      trial.push_back(j);
      const double rss = subset_rss(x, y, trial);
      if (best_j < 0 || rss < best_rss - std::max(1e-10 * best_rss, rss_slack)) {
        best_rss = rss;
        best_j = j;
      }
    }
    if (best_j < 0) break;
    active.push_back(best_j);
    std::vector<int> sorted = active;
    std::sort(sorted.begin(), sorted.end());
    Vector beta;
    const double rss = subset_rss(x, y, sorted, &beta);
    out.order.push_back(best_j);
    out.betas.push_back(beta);
    out.rss.push_back(rss);
  }
  return out;
}

}  // namespace testutil
