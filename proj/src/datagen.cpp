#include "sparsebench/datagen.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sparsebench::datagen {

Ar1Covariance::Ar1Covariance(int p, double rho) : p_(p), rho_(rho) {
  if (p < 1) throw std::invalid_argument("Ar1Covariance: p must be >= 1");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("Ar1Covariance: rho must lie in [0,1)");
}

double Ar1Covariance::quad_form(const Vector& v) const {
  if (v.size() != p_)
    throw std::invalid_argument("Ar1Covariance::quad_form: size mismatch");
  // (Sigma v)_i = a_i + b_i with a_i = sum_{j<=i} rho^(i-j) v_j and
  // b_i = sum_{j>i} rho^(j-i) v_j, each a linear recurrence.
  double total = 0.0;
  Vector b(p_);
  b[p_ - 1] = 0.0;
  for (int i = p_ - 2; i >= 0; --i) b[i] = rho_ * (v[i + 1] + b[i + 1]);
  double a = 0.0;
  for (int i = 0; i < p_; ++i) {
    a = v[i] + rho_ * a;
    total += v[i] * (a + b[i]);
  }
  return total;
}

Matrix Ar1Covariance::dense() const {
  Matrix m(p_, p_);
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < p_; ++j) m(i, j) = std::pow(rho_, std::abs(i - j));
  return m;
}

Vector Ar1Covariance::sample(RngStream& stream) const {
  Vector x(p_);
  const double w = std::sqrt(1.0 - rho_ * rho_);
  x[0] = stream.normal();
  for (int i = 1; i < p_; ++i) x[i] = rho_ * x[i - 1] + w * stream.normal();
  return x;
}

Matrix Ar1Covariance::lower_cholesky() const {
  // Closed form of the AR(1) recurrence as a matrix: row i is
  // rho^(i-j) * sqrt(1-rho^2) for 0 < j <= i, and rho^i in column 0.
  Matrix l = Matrix::Zero(p_, p_);
  const double w = std::sqrt(1.0 - rho_ * rho_);
  for (int i = 0; i < p_; ++i) {
    l(i, 0) = std::pow(rho_, i);
    for (int j = 1; j <= i; ++j) l(i, j) = std::pow(rho_, i - j) * w;
  }
  return l;
}

void ScenarioSpec::validate() const {
  if (n < 1 || p < 1 || s < 1)
    throw std::invalid_argument("ScenarioSpec: n, p, s must be positive");
  if (s > p) throw std::invalid_argument("ScenarioSpec: s must be <= p");
  if (beta_type != 1 && beta_type != 2 && beta_type != 3 && beta_type != 5)
    throw std::invalid_argument("ScenarioSpec: beta_type must be 1, 2, 3 or 5");
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::invalid_argument("ScenarioSpec: rho must lie in [0,1)");
  if (!(snr > 0.0)) throw std::invalid_argument("ScenarioSpec: snr must be > 0");
  if (reps < 1) throw std::invalid_argument("ScenarioSpec: reps must be >= 1");
}

std::string ScenarioSpec::id() const {
  std::ostringstream os;
  os << setting << "-n" << n << "-p" << p << "-s" << s << "-b" << beta_type
     << "-rho" << rho << "-snr" << snr;
  return os.str();
}

void apply_setting(ScenarioSpec& spec, const std::string& name) {
  if (name == "low") {
    spec.n = 100, spec.p = 10, spec.s = 5;
  } else if (name == "medium") {
    spec.n = 500, spec.p = 100, spec.s = 5;
  } else if (name == "high-5") {
    spec.n = 50, spec.p = 1000, spec.s = 5;
  } else if (name == "high-10") {
    spec.n = 100, spec.p = 1000, spec.s = 10;
  } else {
    throw std::invalid_argument("unknown setting '" + name + "'");
  }
  spec.setting = name;
}

Vector make_coefficients(int p, int s, int beta_type) {
  if (s < 1 || s > p)
    throw std::invalid_argument("make_coefficients: need 1 <= s <= p");
  Vector beta = Vector::Zero(p);
  switch (beta_type) {
    case 1: {
      if (s < 2)
        throw std::invalid_argument(
            "make_coefficients: beta_type 1 needs s >= 2");
      for (int j = 1; j <= s; ++j) {
        const double raw =
            1.0 + static_cast<double>(j - 1) * (p - 1) / (s - 1);
        beta[static_cast<int>(std::round(raw)) - 1] = 1.0;
      }
      break;
    }
    case 2:
      beta.head(s).setOnes();
      break;
    case 3: {
      if (s < 2)
        throw std::invalid_argument(
            "make_coefficients: beta_type 3 needs s >= 2");
      for (int j = 0; j < s; ++j)
        beta[j] = 10.0 - static_cast<double>(j) * 9.5 / (s - 1);
      break;
    }
    case 5: {
      beta.head(s).setOnes();
      for (int i = s; i < p; ++i) beta[i] = std::pow(0.5, i + 1 - s);
      break;
    }
    default:
      throw std::invalid_argument("make_coefficients: beta_type must be 1, 2, 3 or 5");
  }
  return beta;
}

Ar1Covariance make_covariance(int p, double rho) { return {p, rho}; }

double noise_variance(const Vector& beta0, const Ar1Covariance& sigma,
                      double snr) {
  if (!(snr > 0.0)) throw std::invalid_argument("noise_variance: snr must be > 0");
  if (beta0.isZero(0.0))
    throw std::invalid_argument("noise_variance: beta0 = 0 has no defined SNR");
  return sigma.quad_form(beta0) / snr;
}

GroundTruth make_ground_truth(const ScenarioSpec& spec) {
  spec.validate();
  Vector beta0 = make_coefficients(spec.p, spec.s, spec.beta_type);
  Ar1Covariance sigma = make_covariance(spec.p, spec.rho);
  const double sigma2 = noise_variance(beta0, sigma, spec.snr);
  return GroundTruth{std::move(beta0), sigma, sigma2, spec.snr};
}

Dataset sample_dataset(int n, const GroundTruth& truth, RngStream& stream) {
  if (n < 1) throw std::invalid_argument("sample_dataset: n must be >= 1");
  const int p = truth.sigma.dim();
  Dataset d;
  d.X.resize(n, p);
  for (int i = 0; i < n; ++i) d.X.row(i) = truth.sigma.sample(stream).transpose();
  const double sd = std::sqrt(truth.sigma2);
  d.Y = d.X * truth.beta0;
  for (int i = 0; i < n; ++i) d.Y[i] += sd * stream.normal();
  return d;
}

}  // namespace sparsebench::datagen
