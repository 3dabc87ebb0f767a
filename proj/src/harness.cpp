#include "sparsebench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "sparsebench/lasso.hpp"
#include "sparsebench/stepwise.hpp"
#include "sparsebench/subset.hpp"

namespace sparsebench::harness {

namespace {

using Clock = std::chrono::steady_clock;

std::string format_param(const char* name, double v) {
  std::ostringstream os;
  os << name << "=" << v;
  return os.str();
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::kLasso: return "lasso";
    case Method::kRelaxo: return "relaxo";
    case Method::kFs: return "fs";
    case Method::kBs: return "bs";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "lasso") return Method::kLasso;
  if (name == "relaxo") return Method::kRelaxo;
  if (name == "fs") return Method::kFs;
  if (name == "bs") return Method::kBs;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected lasso, relaxo, fs or bs)");
}

std::vector<Method> parse_method_list(const std::string& csv_list) {
  std::vector<Method> methods;
  std::string token;
  std::istringstream in(csv_list);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    Method m = method_from_name(token);
    if (std::find(methods.begin(), methods.end(), m) == methods.end())
      methods.push_back(m);
  }
  if (methods.empty())
    throw std::invalid_argument("empty method list");
  return methods;
}

Eigen::Index tune_validation(const CoefficientPath& path, const Dataset& val) {
  if (path.size() == 0)
    throw std::invalid_argument("tune_validation: empty path");
  Eigen::Index best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  int best_nnz = 0;
  for (Eigen::Index t = 0; t < path.size(); ++t) {
    const double err = (val.Y - val.X * path.betas.col(t)).squaredNorm();
    const int nz = count_nonzeros(path.betas.col(t));
    if (err < best_err || (err == best_err && nz < best_nnz)) {
      best = t;
      best_err = err;
      best_nnz = nz;
    }
  }
  return best;
}

Eigen::Index tune_oracle(const std::vector<CoefficientPath>& paths,
                         const GroundTruth& truth) {
  if (paths.empty()) throw std::invalid_argument("tune_oracle: no paths");
  const Eigen::Index t_count = paths.front().size();
  for (const auto& p : paths)
    if (p.size() != t_count)
      throw std::invalid_argument("tune_oracle: mismatched tuning grids");
  Eigen::Index best = 0;
  double best_risk = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < t_count; ++t) {
    double risk = 0.0;
    for (const auto& p : paths) {
      const Vector diff = p.betas.col(t) - truth.beta0;
      risk += truth.sigma.quad_form(diff);
    }
    risk /= static_cast<double>(paths.size());
    if (risk < best_risk) {
      best_risk = risk;
      best = t;
    }
  }
  return best;
}

GridPolicy GridPolicy::for_spec(const ScenarioSpec& spec) {
  GridPolicy g;
  const bool low = spec.setting == "low";
  g.lambda_count = low ? 50 : 100;
  g.lambda_eps = spec.n > spec.p ? 1e-4 : 1e-2;
  g.kmax = low ? std::min(spec.p, 10) : std::min({spec.n, spec.p, 50});
  g.kmax = std::min(g.kmax, std::min(spec.n, spec.p));
  return g;
}

double reference_value(const std::string& metric, const ScenarioSpec& spec) {
  if (metric == "rr") return 1.0;                              // null
  if (metric == "rte") return spec.snr + 1.0;                  // null
  if (metric == "pve") return metrics::population_pve(spec.snr);  // perfect
  if (metric == "nnz") return static_cast<double>(spec.s);     // truth
  throw std::invalid_argument("unknown metric '" + metric + "'");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPARSEBENCH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

/// Everything one repetition produces for one method.
struct MethodFit {
  CoefficientPath path;
  double seconds = 0.0;
  std::optional<int> certified_count;  // best subset only
  bool ok = false;
  std::string error;
};

CoefficientPath lasso_to_path(const lasso::LassoPath& lp) {
  CoefficientPath path;
  const Eigen::Index t = static_cast<Eigen::Index>(lp.betas.size());
  path.betas.resize(lp.betas.front().size(), t);
  for (Eigen::Index i = 0; i < t; ++i) {
    path.betas.col(i) = lp.betas[i];
    path.labels.push_back(format_param("lambda", lp.lambdas[i]));
  }
  return path;
}

CoefficientPath relaxed_to_path(const lasso::RelaxedPath& rp) {
  CoefficientPath path;
  const Eigen::Index m = static_cast<Eigen::Index>(rp.betas.size());
  const Eigen::Index g = rp.gammas.size();
  path.betas.resize(rp.betas.front().rows(), m * g);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < g; ++j) {
      path.betas.col(i * g + j) = rp.betas[i].col(j);
      path.labels.push_back(format_param("lambda", rp.base.lambdas[i]) + ";" +
                            format_param("gamma", rp.gammas[j]));
    }
  }
  return path;
}

CoefficientPath stepwise_to_path(const stepwise::StepwisePath& sp) {
  CoefficientPath path;
  const Eigen::Index t = static_cast<Eigen::Index>(sp.betas.size());
  path.betas.resize(sp.betas.front().size(), t);
  for (Eigen::Index i = 0; i < t; ++i) {
    path.betas.col(i) = sp.betas[i];
    path.labels.push_back("k=" + std::to_string(i));
  }
  return path;
}

CoefficientPath subset_to_path(const std::vector<subset::SubsetSolution>& bp) {
  CoefficientPath path;
  const Eigen::Index t = static_cast<Eigen::Index>(bp.size());
  path.betas.resize(bp.front().beta.size(), t);
  for (Eigen::Index i = 0; i < t; ++i) {
    path.betas.col(i) = bp[i].beta;
    path.labels.push_back("k=" + std::to_string(i));
  }
  return path;
}

MethodFit fit_method(Method method, const Dataset& train,
                     const GridPolicy& grid, const HarnessOptions& opts,
                     RngStream solver_stream) {
  MethodFit out;
  const auto t0 = Clock::now();
  try {
    switch (method) {
      case Method::kLasso: {
        auto g = lasso::lambda_grid(train.X, train.Y, grid.lambda_count,
                                    grid.lambda_eps);
        out.path = lasso_to_path(lasso::lasso_path(train.X, train.Y, g.values));
        break;
      }
      case Method::kRelaxo: {
        auto g = lasso::lambda_grid(train.X, train.Y, grid.lambda_count,
                                    grid.lambda_eps);
        auto base = lasso::lasso_path(train.X, train.Y, g.values);
        out.path = relaxed_to_path(
            lasso::relaxed_path(train.X, train.Y, base,
                                lasso::default_gammas()));
        break;
      }
      case Method::kFs: {
        auto sp = stepwise::fs_path(train.X, train.Y, grid.kmax);
        out.path = stepwise_to_path(sp);
        break;
      }
      case Method::kBs: {
        subset::SubsetOptions sopts;
        sopts.restarts = opts.bs_restarts;
        auto bp = subset::bs_path(train.X, train.Y, grid.kmax,
                                  opts.bs_budget_per_k, solver_stream, sopts);
        int certified = 0;
        for (const auto& sol : bp)
          if (sol.certified) ++certified;
        out.certified_count = certified;
        out.path = subset_to_path(bp);
        break;
      }
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  out.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

struct RepData {
  Dataset train;
  Dataset val;
  std::map<Method, MethodFit> fits;
};

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
        body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<MethodSummary> aggregate(const std::vector<MetricRecord>& records,
                                     const ScenarioSpec& spec) {
  struct Key {
    std::string method, rule, metric;
    bool operator<(const Key& o) const {
      return std::tie(method, rule, metric) <
             std::tie(o.method, o.rule, o.metric);
    }
  };
  std::map<Key, std::vector<double>> groups;
  for (const auto& rec : records) {
    groups[{rec.method, rec.tuning_rule, "rr"}].push_back(rec.rr);
    groups[{rec.method, rec.tuning_rule, "rte"}].push_back(rec.rte);
    groups[{rec.method, rec.tuning_rule, "pve"}].push_back(rec.pve);
    groups[{rec.method, rec.tuning_rule, "nnz"}].push_back(
        static_cast<double>(rec.nnz));
  }
  std::vector<MethodSummary> out;
  for (const auto& [key, values] : groups) {
    MethodSummary s;
    s.method = method_from_name(key.method);
    s.rule = key.rule == "val" ? TuningRule::kValidation : TuningRule::kOracle;
    s.metric = key.metric;
    s.reps = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / s.reps;
    if (s.reps >= 2) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.se = std::sqrt(ss / (s.reps - 1)) / std::sqrt(s.reps);
    }
    s.reference = reference_value(key.metric, spec);
    out.push_back(std::move(s));
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioSpec& spec,
                            const std::vector<Method>& methods,
                            const HarnessOptions& opts) {
  spec.validate();
  if (methods.empty())
    throw std::invalid_argument("run_scenario: no methods requested");
  if (!opts.validation && !opts.oracle)
    throw std::invalid_argument("run_scenario: no tuning rule requested");

  const GroundTruth truth = datagen::make_ground_truth(spec);
  const GridPolicy grid = GridPolicy::for_spec(spec);
  const RngStream root(spec.seed);

  std::vector<RepData> reps(spec.reps);
  const int threads = resolve_threads(opts.threads);
  parallel_for(spec.reps, threads, [&](int r) {
    RngStream rep_stream = root.child(r);
    RngStream train_stream = rep_stream.child(0);
    RngStream val_stream = rep_stream.child(1);
    RepData& data = reps[r];
    data.train = datagen::sample_dataset(spec.n, truth, train_stream);
    data.val = datagen::sample_dataset(spec.n, truth, val_stream);
    for (size_t mi = 0; mi < methods.size(); ++mi) {
      data.fits[methods[mi]] = fit_method(
          methods[mi], data.train, grid, opts, rep_stream.child(2 + mi));
    }
  });

  ScenarioResult result;
  result.spec = spec;
  const std::string scenario_id = spec.id();

  for (Method m : methods) {
    std::vector<double> times;
    std::vector<int> certified;
    std::vector<const CoefficientPath*> ok_paths;
    std::vector<int> ok_reps;
    for (int r = 0; r < spec.reps; ++r) {
      const MethodFit& fit = reps[r].fits.at(m);
      if (!fit.ok) {
        result.failures.push_back({m, r, fit.error});
        continue;
      }
      times.push_back(fit.seconds);
      if (fit.certified_count) certified.push_back(*fit.certified_count);
      ok_paths.push_back(&fit.path);
      ok_reps.push_back(r);
    }

    if (opts.validation) {
      for (size_t i = 0; i < ok_paths.size(); ++i) {
        const int r = ok_reps[i];
        const Eigen::Index t = tune_validation(*ok_paths[i], reps[r].val);
        MetricRecord rec = metrics::score(ok_paths[i]->betas.col(t), truth);
        rec.method = method_name(m);
        rec.scenario = scenario_id;
        rec.rep = r;
        rec.tuning_rule = "val";
        result.records.push_back(std::move(rec));
      }
    }
    if (opts.oracle && !ok_paths.empty()) {
      std::vector<CoefficientPath> paths;
      paths.reserve(ok_paths.size());
      for (const auto* p : ok_paths) paths.push_back(*p);
      const Eigen::Index t = tune_oracle(paths, truth);
      for (size_t i = 0; i < ok_paths.size(); ++i) {
        MetricRecord rec = metrics::score(ok_paths[i]->betas.col(t), truth);
        rec.method = method_name(m);
        rec.scenario = scenario_id;
        rec.rep = ok_reps[i];
        rec.tuning_rule = "oracle";
        result.records.push_back(std::move(rec));
      }
    }

    MethodTiming timing;
    timing.method = m;
    if (!times.empty()) {
      double sum = 0.0;
      for (double v : times) sum += v;
      timing.mean_path_seconds = sum / times.size();
      if (times.size() >= 2) {
        double ss = 0.0;
        for (double v : times)
          ss += (v - timing.mean_path_seconds) * (v - timing.mean_path_seconds);
        timing.se_path_seconds =
            std::sqrt(ss / (times.size() - 1)) / std::sqrt(times.size());
      }
    }
    if (!certified.empty()) {
      double sum = 0.0;
      for (int c : certified) sum += c;
      timing.certified_mean = sum / certified.size();
    }
    result.timings.push_back(std::move(timing));
  }

  result.summaries = aggregate(result.records, spec);
  return result;
}

}  // namespace sparsebench::harness
