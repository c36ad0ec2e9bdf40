#include "substable/stable_params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace substable {

StableParams::StableParams(double alpha, Eigen::VectorXd mu, PackedSymmetric sigma)
    : alpha_(alpha), mu_(std::move(mu)), sigma_(std::move(sigma)) {
  if (!(alpha_ > 0.0 && alpha_ < 2.0)) {
    throw std::domain_error("StableParams: alpha must lie in (0, 2), got " +
                            std::to_string(alpha_));
  }
  if (mu_.size() < 1 || mu_.size() != sigma_.dim()) {
    throw std::invalid_argument("StableParams: dim(mu) must equal dim(sigma) >= 1");
  }
  if (!mu_.allFinite()) {
    throw std::invalid_argument("StableParams: mu must be finite");
  }
  const PsdInfo psd = psd_check(sigma_);
  if (!psd.ok) {
    throw std::domain_error("StableParams: sigma is not positive semi-definite "
                            "(min eigenvalue " + std::to_string(psd.min_eigenvalue) + ")");
  }
  sigma_dense_ = sigma_.to_dense();
}

}  // namespace substable
