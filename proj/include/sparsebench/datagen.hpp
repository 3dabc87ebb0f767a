#pragma once

#include <cstdint>
#include <string>

#include "sparsebench/rng.hpp"
#include "sparsebench/types.hpp"

namespace sparsebench::datagen {

/// First-order autoregressive covariance, entry (i,j) = rho^|i-j|.
/// Quadratic forms and sampling run in O(p) per vector without ever
/// materializing the dense matrix; dense() exists for small-p cross-checks.
class Ar1Covariance {
 public:
  Ar1Covariance(int p, double rho);

  int dim() const { return p_; }
  double rho() const { return rho_; }

  /// v' Sigma v via forward/backward recurrences, O(p).
  double quad_form(const Vector& v) const;

  Matrix dense() const;

  /// Applies the (conventional lower) Cholesky factor of Sigma to a vector
  /// of i.i.d. standard normals: x_1 = z_1, x_i = rho*x_{i-1} + sqrt(1-rho^2)*z_i.
  /// The marginal law of the result is N(0, Sigma).
  Vector sample(RngStream& stream) const;

  Matrix lower_cholesky() const;

 private:
  int p_;
  double rho_;
};

/// True data-generating process: coefficients, predictor covariance, noise
/// variance, and the signal-to-noise ratio that ties them together.
struct GroundTruth {
  Vector beta0;
  Ar1Covariance sigma;
  double sigma2;
  double snr;

  double signal_strength() const { return sigma.quad_form(beta0); }
};

struct ScenarioSpec {
  std::string setting;  // "low", "medium", "high-5", "high-10", or "custom"
  int n = 0;
  int p = 0;
  int s = 0;
  int beta_type = 2;  // one of {1, 2, 3, 5}
  double rho = 0.0;
  double snr = 1.0;
  int reps = 10;
  std::uint64_t seed = 1;

  void validate() const;
  std::string id() const;
};

/// Expands a named problem setting to its (n, p, s) triple.
/// Knows "low" (100,10,5), "medium" (500,100,5), "high-5" (50,1000,5) and
/// "high-10" (100,1000,10).
void apply_setting(ScenarioSpec& spec, const std::string& name);

/// Sparse coefficient patterns, by type:
///   1: s ones at indices round(1 + (j-1)(p-1)/(s-1)), j = 1..s (1-based);
///   2: first s entries 1;
///   3: first s entries equally spaced from 10 down to 0.5;
///   5: first s entries 1, then geometric tail 0.5^(i-s) for i > s.
/// Types 1 and 3 need s >= 2 (the spacing is undefined for a single point).
Vector make_coefficients(int p, int s, int beta_type);

Ar1Covariance make_covariance(int p, double rho);

/// sigma^2 = beta0' Sigma beta0 / snr.
double noise_variance(const Vector& beta0, const Ar1Covariance& sigma,
                      double snr);

GroundTruth make_ground_truth(const ScenarioSpec& spec);

/// Rows of X i.i.d. N(0, Sigma); Y = X beta0 + eps, eps i.i.d. N(0, sigma^2).
Dataset sample_dataset(int n, const GroundTruth& truth, RngStream& stream);

}  // namespace sparsebench::datagen
