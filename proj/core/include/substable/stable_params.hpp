#pragma once

#include <Eigen/Dense>

#include "substable/packed_symmetric.hpp"

namespace substable {

/// Parameter triple (alpha, mu, Sigma) of the p-variate sub-Gaussian
/// alpha-stable law with characteristic function
///
///   phi(t) = exp( i t'mu - (t'Sigma t / 2)^(alpha/2) ),
///
/// 0 < alpha < 2, Sigma symmetric positive semi-definite.
/// Validated at construction and immutable afterwards.
class StableParams {
public:
  StableParams(double alpha, Eigen::VectorXd mu, PackedSymmetric sigma);

  double alpha() const { return alpha_; }
  const Eigen::VectorXd& mu() const { return mu_; }
  const PackedSymmetric& sigma() const { return sigma_; }
  const Eigen::MatrixXd& sigma_dense() const { return sigma_dense_; }
  int p() const { return static_cast<int>(mu_.size()); }

private:
  double alpha_ = 0.0;
  Eigen::VectorXd mu_;
  PackedSymmetric sigma_;
  Eigen::MatrixXd sigma_dense_;
};

}  // namespace substable
