#include "substable/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace substable {

double positive_stable_draw(double alpha_half, StreamRng& rng) {
  const double a = alpha_half;
  const double u = M_PI * rng.uniform_open();
  const double w = rng.exponential();
  // Kanter's representation; the scale that makes the Laplace transform
  // exactly exp(-g^a) cancels against the skewed-stable normalization.
  const double ratio = (1.0 - a) / a;
  return std::sin(a * u) * std::pow(std::sin((1.0 - a) * u) / w, ratio) /
         std::pow(std::sin(u), 1.0 / a);
}

Eigen::VectorXd sample_positive_stable(double alpha_half, long n, RngSpec spec) {
  if (!(alpha_half > 0.0 && alpha_half < 1.0)) {
    throw std::domain_error("sample_positive_stable: alpha_half must lie in (0, 1), got " +
                            std::to_string(alpha_half));
  }
  if (n < 1) throw std::invalid_argument("sample_positive_stable: n must be >= 1");
  StreamRng rng(spec);
  Eigen::VectorXd out(n);
  for (long j = 0; j < n; ++j) out[j] = positive_stable_draw(alpha_half, rng);
  return out;
}

Eigen::MatrixXd scale_factor(const PackedSymmetric& sigma) {
  const PsdInfo psd = psd_check(sigma);
  if (!psd.ok) {
    throw std::domain_error("scale_factor: sigma is not positive semi-definite");
  }
  const Eigen::MatrixXd dense = sigma.to_dense();
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() == Eigen::Success) {
    return llt.matrixL();
  }
  // Semi-definite input: symmetric eigendecomposition square root.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return solver.eigenvectors() * roots.asDiagonal();
}

SampleMatrix sample_subgaussian(const StableParams& params, long n, RngSpec spec) {
  if (n < 1) throw std::invalid_argument("sample_subgaussian: n must be >= 1");
  const int p = params.p();
  const Eigen::MatrixXd factor = scale_factor(params.sigma());
  const double a = params.alpha() / 2.0;

  StreamRng rng(spec);
  Eigen::MatrixXd data(n, p);
  Eigen::VectorXd z(p);
  for (long j = 0; j < n; ++j) {
    const double subordinator = positive_stable_draw(a, rng);
    for (int k = 0; k < p; ++k) z[k] = rng.normal();
    data.row(j) = (params.mu() + std::sqrt(subordinator) * (factor * z)).transpose();
  }
  return SampleMatrix(std::move(data));
}

}  // namespace substable
