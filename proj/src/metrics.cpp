#include "sparsebench/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sparsebench::metrics {

double relative_risk(const Vector& beta, const GroundTruth& truth) {
  const Vector diff = beta - truth.beta0;
  return truth.sigma.quad_form(diff) / truth.signal_strength();
}

double relative_test_error(const Vector& beta, const GroundTruth& truth) {
  return relative_risk(beta, truth) * truth.snr + 1.0;
}

double pve(const Vector& beta, const GroundTruth& truth) {
  return 1.0 - relative_test_error(beta, truth) / (truth.snr + 1.0);
}

int nnz(const Vector& beta) { return count_nonzeros(beta); }

double population_pve(double snr) { return snr / (1.0 + snr); }

MetricRecord score(const Vector& beta, const GroundTruth& truth) {
  MetricRecord rec;
  rec.rr = relative_risk(beta, truth);
  rec.rte = rec.rr * truth.snr + 1.0;
  rec.pve = 1.0 - rec.rte / (truth.snr + 1.0);
  rec.nnz = nnz(beta);
  return rec;
}

DfCurve df_montecarlo(const DfFitter& fitter, const Matrix& x,
                      const GroundTruth& truth, int reps, RngStream stream) {
  if (reps < 2) throw std::invalid_argument("df_montecarlo: need reps >= 2");
  const Eigen::Index n = x.rows();
  const Eigen::Index t = static_cast<Eigen::Index>(fitter.labels.size());
  const double sd = std::sqrt(truth.sigma2);
  const Vector mean_signal = x * truth.beta0;

  std::vector<Matrix> fits;  // per kept rep: n x t fitted values
  std::vector<Vector> ys;
  fits.reserve(reps);
  ys.reserve(reps);
  int dropped = 0;
  for (int r = 0; r < reps; ++r) {
    RngStream rs = stream.child(r);
    Vector y = mean_signal + sd * rs.normals(n);
    try {
      Matrix fitted = fitter.fit(x, y);
      if (fitted.rows() != n || fitted.cols() != t)
        throw std::runtime_error("df fitter returned wrong shape");
      fits.push_back(std::move(fitted));
      ys.push_back(std::move(y));
    } catch (const std::exception&) {
      ++dropped;
    }
  }
  const int kept = static_cast<int>(fits.size());
  if (dropped * 10 > reps) {
    std::ostringstream msg;
    msg << "df_montecarlo: " << dropped << " of " << reps
        << " repetitions failed";
    throw std::runtime_error(msg.str());
  }
  if (kept < 2) throw std::runtime_error("df_montecarlo: too few repetitions");

  // Per (i, t): sums needed for the sample covariance and its delete-one
  // versions. Means first, then centered products, for numerical stability.
  Matrix mean_fit = Matrix::Zero(n, t);
  Vector mean_y = Vector::Zero(n);
  for (int r = 0; r < kept; ++r) {
    mean_fit += fits[r];
    mean_y += ys[r];
  }
  mean_fit /= kept;
  mean_y /= kept;

  DfCurve curve;
  curve.labels = fitter.labels;
  curve.df.resize(t);
  curve.se.resize(t);
  curve.reps_used = kept;
  curve.reps_dropped = dropped;

  // full-sample df per tuning index
  Vector cov_sum = Vector::Zero(t);
  for (int r = 0; r < kept; ++r) {
    const Vector dy = ys[r] - mean_y;
    cov_sum += ((fits[r] - mean_fit).array().colwise() * dy.array())
                   .colwise()
                   .sum()
                   .transpose()
                   .matrix();
  }
  curve.df = cov_sum / ((kept - 1) * truth.sigma2);

  // delete-one jackknife
  Matrix leave_out(kept, t);
  for (int r = 0; r < kept; ++r) {
    // means and centered cross products without repetition r
    const double m = static_cast<double>(kept);
    const Vector dy_r = ys[r] - mean_y;
    const Matrix df_r = fits[r] - mean_fit;
    // sum_{s != r} (f_s - mean_{-r})(y_s - mean_{-r}) =
    //   cov_sum_full - d_r - (1/(m-1)) d_r   with d_r the centered product,
    // using mean_{-r} = mean + (mean - v_r)/(m-1).
    const Vector d_r = (df_r.array().colwise() * dy_r.array())
                           .colwise()
                           .sum()
                           .transpose()
                           .matrix();
    const Vector adj = cov_sum - d_r * (m / (m - 1.0));
    leave_out.row(r) =
        (adj / ((m - 2.0) * truth.sigma2)).transpose();
  }
  const Eigen::RowVectorXd jk_mean = leave_out.colwise().mean();
  for (Eigen::Index c = 0; c < t; ++c) {
    const double ss = (leave_out.col(c).array() - jk_mean[c]).square().sum();
    curve.se[c] = std::sqrt(ss * (kept - 1) / static_cast<double>(kept));
  }
  return curve;
}

}  // namespace sparsebench::metrics
