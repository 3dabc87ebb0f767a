#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sparsebench/datagen.hpp"
#include "sparsebench/rng.hpp"
#include "sparsebench/types.hpp"

namespace sparsebench::metrics {

using datagen::GroundTruth;

/// (b - beta0)' Sigma (b - beta0) / beta0' Sigma beta0. Perfect 0, null 1.
double relative_risk(const Vector& beta, const GroundTruth& truth);

/// Expected test error over the Bayes error: rr * snr + 1 (the two forms
/// agree because sigma2 * snr equals the signal strength). Perfect 1, null
/// snr + 1.
double relative_test_error(const Vector& beta, const GroundTruth& truth);

/// Proportion of variance explained: 1 - rte/(snr + 1). Perfect snr/(1+snr),
/// null 0; worse-than-null fits go negative.
double pve(const Vector& beta, const GroundTruth& truth);

/// Count of exactly-nonzero coefficients (solvers produce hard zeros).
int nnz(const Vector& beta);

/// Best attainable PVE at a given signal-to-noise ratio: snr/(1+snr).
double population_pve(double snr);

/// One scored fit.
struct MetricRecord {
  std::string method;
  std::string scenario;
  int rep = 0;
  std::string tuning_rule;
  double rr = 0.0;
  double rte = 0.0;
  double pve = 0.0;
  int nnz = 0;
};

MetricRecord score(const Vector& beta, const GroundTruth& truth);

/// Effective degrees of freedom along a tuning grid, estimated by the
/// covariance formula df = (1/sigma2) * sum_i Cov(yhat_i, y_i) across
/// repeated noise draws at fixed X.
struct DfCurve {
  std::vector<std::string> labels;  // one per tuning index
  Vector df;
  Vector se;        // delete-one jackknife standard errors
  int reps_used = 0;
  int reps_dropped = 0;
};

/// Fits a full path on (X, Y) and returns the fitted values, n rows by one
/// column per tuning index. The column layout must not depend on Y.
struct DfFitter {
  std::string method;
  std::vector<std::string> labels;
  std::function<Matrix(const Matrix& x, const Vector& y)> fit;
};

/// X stays fixed; each repetition draws Y = X beta0 + eps from its own child
/// stream. Repetitions where the fitter throws are dropped and counted;
/// more than 10% dropped is an error.
DfCurve df_montecarlo(const DfFitter& fitter, const Matrix& x,
                      const GroundTruth& truth, int reps, RngStream stream);

}  // namespace sparsebench::metrics
