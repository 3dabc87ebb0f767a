#include "sparsebench/subset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>

#include <Eigen/Dense>

namespace sparsebench::subset {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Minimum-norm least squares on a column subset; returns RSS.
double solve_on(const Matrix& x, const Vector& y, const IndexList& cols,
                Vector* beta_out) {
  if (cols.empty()) {
    if (beta_out) *beta_out = Vector::Zero(x.cols());
    return y.squaredNorm();
  }
  Matrix sub(x.rows(), cols.size());
  for (size_t a = 0; a < cols.size(); ++a) sub.col(a) = x.col(cols[a]);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(sub);
  const Vector coef = cod.solve(y);
  const double rss = (y - sub * coef).squaredNorm();
  if (beta_out) {
    *beta_out = Vector::Zero(x.cols());
    for (size_t a = 0; a < cols.size(); ++a) (*beta_out)[cols[a]] = coef[a];
  }
  return rss;
}

SubsetSolution polish(const Matrix& x, const Vector& y, IndexList support) {
  std::sort(support.begin(), support.end());
  SubsetSolution sol;
  sol.rss = solve_on(x, y, support, &sol.beta);
  sol.support = std::move(support);
  return sol;
}

bool better(const SubsetSolution& a, const SubsetSolution& b) {
  if (a.rss != b.rss) return a.rss < b.rss;
  return a.support < b.support;
}

}  // namespace

Vector hard_threshold(const Vector& v, int k) {
  const Eigen::Index p = v.size();
  if (k >= p) return v;
  std::vector<int> idx(p);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](int a, int b) {
                      const double fa = std::abs(v[a]), fb = std::abs(v[b]);
                      if (fa != fb) return fa > fb;
                      return a < b;
                    });
  Vector out = Vector::Zero(p);
  for (int i = 0; i < k; ++i) out[idx[i]] = v[idx[i]];
  return out;
}

namespace {

double spectral_lipschitz(const Matrix& x) {
  const double smax = x.jacobiSvd().singularValues()(0);
  return smax * smax;
}

SubsetSolution iht_with_lipschitz(const Matrix& x, const Vector& y, int k,
                                  const Vector& init, int max_iter, double tol,
                                  double lip) {
  const auto t0 = Clock::now();
  if (lip <= 0.0) {
    SubsetSolution zero = polish(x, y, {});
    zero.wall_time = seconds_since(t0);
    return zero;
  }
  Vector beta = hard_threshold(init, k);
  double obj = 0.5 * (y - x * beta).squaredNorm();
  for (int it = 0; it < max_iter; ++it) {
    const Vector grad = x.transpose() * (x * beta - y);
    beta = hard_threshold(beta - grad / lip, k);
    const double obj_new = 0.5 * (y - x * beta).squaredNorm();
    const double rel = std::abs(obj - obj_new) / std::max(obj, 1e-300);
    obj = obj_new;
    if (rel <= tol) break;
  }
  SubsetSolution sol = polish(x, y, support_of(beta));
  sol.wall_time = seconds_since(t0);
  return sol;
}

}  // namespace

SubsetSolution iht(const Matrix& x, const Vector& y, int k, const Vector& init,
                   int max_iter, double tol) {
  const Eigen::Index p = x.cols();
  if (k < 1 || k > p) throw std::invalid_argument("iht: need 1 <= k <= p");
  if (init.size() != p) throw std::invalid_argument("iht: bad init length");
  return iht_with_lipschitz(x, y, k, init, max_iter, tol,
                            spectral_lipschitz(x));
}

SubsetSolution warm_start(const Matrix& x, const Vector& y, int k,
                          int restarts, RngStream& stream,
                          const SubsetOptions& opts) {
  if (restarts < 1) throw std::invalid_argument("warm_start: restarts >= 1");
  const Eigen::Index p = x.cols();
  const auto t0 = Clock::now();

  const double xty_max = (x.transpose() * y).lpNorm<Eigen::Infinity>();
  const double lip = spectral_lipschitz(x);
  const double scale = lip > 0.0 ? xty_max / lip : 0.0;

  SubsetSolution best = iht_with_lipschitz(x, y, k, Vector::Zero(p),
                                           opts.iht_max_iter, opts.iht_tol, lip);
  for (int r = 0; r < restarts; ++r) {
    const Vector init = scale * stream.normals(p);
    SubsetSolution cand = iht_with_lipschitz(x, y, k, init, opts.iht_max_iter,
                                             opts.iht_tol, lip);
    if (better(cand, best)) best = std::move(cand);
  }
  best.wall_time = seconds_since(t0);
  return best;
}

namespace {

struct BnbNode {
  IndexList forced_in;
  IndexList forced_out;
  double bound;    // RSS of the relaxation on columns not forced out
  Vector relax;    // relaxation coefficients (for branching)
  long seq;        // insertion order; makes the best-first pop total
};

struct NodeOrder {
  bool operator()(const BnbNode& a, const BnbNode& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;
  }
};

/// RSS of unconstrained least squares on the complement of forced_out.
double relax_bound(const Matrix& x, const Vector& y,
                   const IndexList& forced_out, Vector* coefs) {
  const Eigen::Index p = x.cols();
  IndexList avail;
  avail.reserve(p - forced_out.size());
  size_t fo = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    while (fo < forced_out.size() && forced_out[fo] < j) ++fo;
    if (fo < forced_out.size() && forced_out[fo] == j) continue;
    avail.push_back(static_cast<int>(j));
  }
  return solve_on(x, y, avail, coefs);
}

}  // namespace

SubsetSolution best_subset(const Matrix& x, const Vector& y, int k,
                           double budget_seconds, RngStream stream,
                           const SubsetOptions& opts,
                           const std::optional<SubsetSolution>& seed) {
  const Eigen::Index p = x.cols();
  if (k < 1 || k > p)
    throw std::invalid_argument("best_subset: need 1 <= k <= p");

  const auto t0 = Clock::now();
  SubsetSolution incumbent = warm_start(x, y, k, opts.restarts, stream, opts);
  if (seed && static_cast<int>(seed->support.size()) <= k &&
      better(*seed, incumbent))
    incumbent = *seed;

  if (budget_seconds <= 0.0) {
    incumbent.certified = false;
    incumbent.nodes_explored = 0;
    incumbent.wall_time = seconds_since(t0);
    return incumbent;
  }

  std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> queue;
  long seq = 0;
  long explored = 0;
  bool out_of_time = false;

  BnbNode root;
  root.bound = relax_bound(x, y, {}, &root.relax);
  root.seq = seq++;
  queue.push(std::move(root));

  while (!queue.empty()) {
    if (seconds_since(t0) > budget_seconds) {
      out_of_time = true;
      break;
    }
    BnbNode node = queue.top();
    queue.pop();
    ++explored;
    if (node.bound >= incumbent.rss - opts.prune_slack) continue;

    const int in_count = static_cast<int>(node.forced_in.size());
    const int avail_count = static_cast<int>(p - node.forced_out.size());

    // Leaf cases: the cardinality cap binds, or the relaxation is feasible.
    if (in_count == k || avail_count <= k) {
      IndexList cols = in_count == k ? node.forced_in : IndexList{};
      if (in_count != k) {
        size_t fo = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
          while (fo < node.forced_out.size() && node.forced_out[fo] < j) ++fo;
          if (fo < node.forced_out.size() && node.forced_out[fo] == j) continue;
          cols.push_back(static_cast<int>(j));
        }
      }
      SubsetSolution cand = polish(x, y, cols);
      if (better(cand, incumbent)) incumbent = std::move(cand);
      continue;
    }
    if (count_nonzeros(node.relax) <= k) {
      // Relaxation solution is itself feasible: bound attained.
      SubsetSolution cand = polish(x, y, support_of(node.relax));
      if (better(cand, incumbent)) incumbent = std::move(cand);
      continue;
    }

    // Branch on the free variable with the largest relaxation coefficient.
    int branch_var = -1;
    double branch_mag = -1.0;
    size_t fi = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      while (fi < node.forced_in.size() && node.forced_in[fi] < j) ++fi;
      if (fi < node.forced_in.size() && node.forced_in[fi] == j) continue;
      const double mag = std::abs(node.relax[j]);
      if (mag > branch_mag && node.relax[j] != 0.0) {
        bool is_out = std::binary_search(node.forced_out.begin(),
                                         node.forced_out.end(),
                                         static_cast<int>(j));
        if (!is_out) {
          branch_mag = mag;
          branch_var = static_cast<int>(j);
        }
      }
    }
    if (branch_var < 0) {
      // All free coefficients vanish; the forced-in fit is the subtree's best.
      SubsetSolution cand = polish(x, y, node.forced_in);
      if (better(cand, incumbent)) incumbent = std::move(cand);
      continue;
    }

    BnbNode in_child;
    in_child.forced_in = node.forced_in;
    in_child.forced_in.insert(
        std::lower_bound(in_child.forced_in.begin(), in_child.forced_in.end(),
                         branch_var),
        branch_var);
    in_child.forced_out = node.forced_out;
    in_child.bound = node.bound;  // same relaxation: forced_out unchanged
    in_child.relax = node.relax;
    in_child.seq = seq++;

    BnbNode out_child;
    out_child.forced_in = node.forced_in;
    out_child.forced_out = node.forced_out;
    out_child.forced_out.insert(
        std::lower_bound(out_child.forced_out.begin(),
                         out_child.forced_out.end(), branch_var),
        branch_var);
    out_child.bound = relax_bound(x, y, out_child.forced_out, &out_child.relax);
    out_child.seq = seq++;

    if (in_child.bound < incumbent.rss - opts.prune_slack)
      queue.push(std::move(in_child));
    if (out_child.bound < incumbent.rss - opts.prune_slack)
      queue.push(std::move(out_child));
  }

  incumbent.certified = !out_of_time;
  incumbent.nodes_explored = explored;
  incumbent.wall_time = seconds_since(t0);
  return incumbent;
}

std::vector<SubsetSolution> bs_path(const Matrix& x, const Vector& y, int kmax,
                                    double budget_per_k, RngStream stream,
                                    const SubsetOptions& opts) {
  if (kmax < 1) throw std::invalid_argument("bs_path: kmax must be >= 1");
  std::vector<SubsetSolution> path;
  path.reserve(kmax + 1);

  SubsetSolution null_fit;
  null_fit.beta = Vector::Zero(x.cols());
  null_fit.rss = y.squaredNorm();
  null_fit.certified = true;
  path.push_back(std::move(null_fit));

  for (int k = 1; k <= kmax; ++k) {
    path.push_back(best_subset(x, y, k, budget_per_k, stream.child(k), opts,
                               path.back()));
  }
  return path;
}

}  // namespace sparsebench::subset
