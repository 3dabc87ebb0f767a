#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sparsebench/datagen.hpp"
#include "sparsebench/metrics.hpp"
#include "sparsebench/types.hpp"

namespace sparsebench::harness {

using datagen::GroundTruth;
using datagen::ScenarioSpec;
using metrics::MetricRecord;

enum class Method { kLasso, kRelaxo, kFs, kBs };

std::string method_name(Method m);
Method method_from_name(const std::string& name);
std::vector<Method> parse_method_list(const std::string& csv_list);

enum class TuningRule { kValidation, kOracle };

/// A fitted path flattened over its tuning grid: column t of `betas` is the
/// coefficient vector at tuning index t. `labels` are human-readable grid
/// descriptions used in exports.
struct CoefficientPath {
  Matrix betas;  // p x T
  std::vector<std::string> labels;

  Eigen::Index size() const { return betas.cols(); }
};

/// Index minimizing squared prediction error on the validation set; ties
/// break toward the sparser coefficient vector, then the lower index.
Eigen::Index tune_validation(const CoefficientPath& path, const Dataset& val);

/// One shared index minimizing the across-repetition average of the true
/// predictive risk (b - beta0)' Sigma (b - beta0). All paths must have the
/// same grid shape.
Eigen::Index tune_oracle(const std::vector<CoefficientPath>& paths,
                         const GroundTruth& truth);

struct HarnessOptions {
  bool validation = true;
  bool oracle = false;
  double bs_budget_per_k = 180.0;
  int bs_restarts = 50;
  int threads = 0;  // 0: min(SPARSEBENCH_THREADS or hardware, reps)
};

/// Per-method tuning grid sizes for a scenario: the "low" setting uses the
/// smaller grids (50 lambdas, steps up to 10), everything else 100 lambdas
/// and steps up to min(n, p, 50).
struct GridPolicy {
  int lambda_count;
  double lambda_eps;
  int kmax;

  static GridPolicy for_spec(const ScenarioSpec& spec);
};

struct MethodSummary {
  Method method;
  TuningRule rule;
  std::string metric;  // rr, rte, pve, nnz
  double mean = 0.0;
  double se = 0.0;
  int reps = 0;
  double reference = 0.0;  // null/perfect/truth line for this metric
};

struct MethodTiming {
  Method method;
  double mean_path_seconds = 0.0;
  double se_path_seconds = 0.0;
  // best-subset only: average number of certified solutions per path
  std::optional<double> certified_mean;
};

struct SolverFailure {
  Method method;
  int rep;
  std::string message;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::vector<MetricRecord> records;
  std::vector<MethodSummary> summaries;
  std::vector<MethodTiming> timings;
  std::vector<SolverFailure> failures;
};

/// Runs the full pipeline for one scenario: per repetition draw a training
/// and an equal-sized validation set, fit every requested method's path on
/// the training data, tune by the requested rule(s), and score against the
/// truth. Repetitions use pre-derived child streams and run concurrently;
/// results are identical for any thread count.
ScenarioResult run_scenario(const ScenarioSpec& spec,
                            const std::vector<Method>& methods,
                            const HarnessOptions& opts = {});

/// Mean, standard error (sd/sqrt(reps)) and reference lines per
/// (method, rule, metric) over a set of records.
std::vector<MethodSummary> aggregate(const std::vector<MetricRecord>& records,
                                     const ScenarioSpec& spec);

double reference_value(const std::string& metric, const ScenarioSpec& spec);

/// Worker-count resolution: explicit option, else SPARSEBENCH_THREADS, else
/// hardware concurrency.
int resolve_threads(int requested);

}  // namespace sparsebench::harness
