#include "substable/char_fn.hpp"

#include <cmath>
#include <stdexcept>

namespace substable {

double safe_log_modulus(double modulus, ClampCounter* counter) {
  double m = modulus;
  if (!(m >= kLogModulusFloor)) {  // also catches NaN
    m = kLogModulusFloor;
    if (counter) ++counter->events;
  } else if (m > 1.0 - kLogModulusGap) {
    m = 1.0 - kLogModulusGap;
    if (counter) ++counter->events;
  }
  return std::log(m);
}

double safe_log_modulus(std::complex<double> phi, ClampCounter* counter) {
  return safe_log_modulus(std::abs(phi), counter);
}

std::complex<double> cf_theoretical(const StableParams& params,
                                    const Eigen::VectorXd& t) {
  if (t.size() != params.p()) {
    throw std::invalid_argument("cf_theoretical: t has wrong dimension");
  }
  if (!t.allFinite()) {
    throw std::invalid_argument("cf_theoretical: t must be finite");
  }
  double quad = t.dot(params.sigma_dense() * t);
  const double tol = 1e-10 * std::max(params.sigma().trace(), 0.0) *
                     std::max(1.0, t.squaredNorm());
  if (quad < -tol) {
    throw std::domain_error("cf_theoretical: t'Sigma t < 0; sigma is not PSD");
  }
  quad = std::max(quad, 0.0);
  const double modulus = std::exp(-std::pow(quad / 2.0, params.alpha() / 2.0));
  const double phase = t.dot(params.mu());
  return {modulus * std::cos(phase), modulus * std::sin(phase)};
}

std::complex<double> ecf(const SampleMatrix& sample, const Eigen::VectorXd& t) {
  if (t.size() != sample.p()) {
    throw std::invalid_argument("ecf: t has wrong dimension");
  }
  const Eigen::MatrixXd& x = sample.data();
  const long n = sample.n();
  double re = 0.0, im = 0.0;
  for (long j = 0; j < n; ++j) {
    const double arg = x.row(j).dot(t);
    re += std::cos(arg);
    im += std::sin(arg);
  }
  return {re / static_cast<double>(n), im / static_cast<double>(n)};
}

std::vector<std::complex<double>> ecf_batch(const SampleMatrix& sample,
                                            const Eigen::MatrixXd& grid) {
  if (grid.rows() != sample.p()) {
    throw std::invalid_argument("ecf_batch: grid rows must equal sample dimension");
  }
  const int m = static_cast<int>(grid.cols());
  const Eigen::MatrixXd& x = sample.data();
  const long n = sample.n();
  std::vector<double> re(m, 0.0), im(m, 0.0);
  // Per column the summation order over j matches ecf(), so the two paths
  // agree bit for bit.
  for (long j = 0; j < n; ++j) {
    for (int c = 0; c < m; ++c) {
      const double arg = x.row(j).dot(grid.col(c));
      re[c] += std::cos(arg);
      im[c] += std::sin(arg);
    }
  }
  std::vector<std::complex<double>> out(m);
  for (int c = 0; c < m; ++c) {
    out[c] = {re[c] / static_cast<double>(n), im[c] / static_cast<double>(n)};
  }
  return out;
}

}  // namespace substable
