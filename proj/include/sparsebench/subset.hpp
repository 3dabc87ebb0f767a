#pragma once

#include <optional>
#include <vector>

#include "sparsebench/rng.hpp"
#include "sparsebench/types.hpp"

namespace sparsebench::subset {

struct SubsetSolution {
  Vector beta;           // exact least squares on its support
  IndexList support;     // ascending, size <= k
  double rss = 0.0;
  bool certified = false;  // search exhausted vs. budget hit
  long nodes_explored = 0;
  double wall_time = 0.0;  // seconds
};

struct SubsetOptions {
  double iht_tol = 1e-7;   // relative objective change
  int iht_max_iter = 1000;
  int restarts = 50;       // random re-initializations beyond the zero init
  double prune_slack = 1e-10;
};

/// Projected gradient iteration: keep the k largest-magnitude coefficients
/// of a gradient step with step size 1/sigma_max(X)^2, then polish the final
/// support with exact least squares. Approximate: certified is always false.
SubsetSolution iht(const Matrix& x, const Vector& y, int k, const Vector& init,
                   int max_iter, double tol);

/// Best polished solution over the zero start plus `restarts` random starts.
/// The winner is the lowest RSS, ties broken by lexicographically smallest
/// support, so the result does not depend on evaluation order.
SubsetSolution warm_start(const Matrix& x, const Vector& y, int k,
                          int restarts, RngStream& stream,
                          const SubsetOptions& opts = {});

/// Exact search: best-first branch and bound over column in/out decisions.
/// The bound at a node is the RSS of unconstrained least squares on all
/// columns not forced out (a relaxation: the cardinality cap is dropped on
/// the free variables). On budget expiry the incumbent is returned with
/// certified=false. `incumbent` seeds the search with a known feasible
/// solution (used by bs_path to keep the path monotone under tight budgets).
SubsetSolution best_subset(const Matrix& x, const Vector& y, int k,
                           double budget_seconds, RngStream stream,
                           const SubsetOptions& opts = {},
                           const std::optional<SubsetSolution>& incumbent =
                               std::nullopt);

/// Solutions for k = 0..kmax with a per-k time budget. Never aborts: budget
/// expiries simply leave those entries uncertified.
std::vector<SubsetSolution> bs_path(const Matrix& x, const Vector& y, int kmax,
                                    double budget_per_k, RngStream stream,
                                    const SubsetOptions& opts = {});

/// Keep the k largest-magnitude entries (ties toward lower index).
Vector hard_threshold(const Vector& v, int k);

}  // namespace sparsebench::subset
