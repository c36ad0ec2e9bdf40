#pragma once

#include <Eigen/Dense>

#include "substable/ecf_grid.hpp"
#include "substable/stable_params.hpp"

namespace substable {

/// Asymptotic covariance of sqrt(n) * (theta_hat_n - theta_0), i.e. of the
/// stacked (Re, Im) ECF deviations on the grid:
///
///   Omega = [ Omega_Re   Omega_RI ]
///           [ Omega_RI'  Omega_Im ]
///
/// with, writing phi_j = phi(t_j),
///   Omega_Re[j,k] =  Re phi(t_j+t_k)/2 + Re phi(t_k-t_j)/2 - Re phi_j Re phi_k
///   Omega_Im[j,k] = -Re phi(t_j+t_k)/2 + Re phi(t_k-t_j)/2 - Im phi_j Im phi_k
///   Omega_RI[j,k] =  Im phi(t_j+t_k)/2 + Im phi(t_k-t_j)/2 - Re phi_j Im phi_k
///
/// These follow from Cov[e^{itX}, e^{iτX}] = phi(t+τ) - phi(t)phi(τ) with
/// Re z = (z + conj z)/2 and Im z = (z - conj z)/(2i); the diagonal of
/// Omega_Im is then 1/2 - Re phi(2t)/2 - (Im phi(t))^2 >= 0, which pins the
/// signs. Validated against a Monte Carlo covariance oracle in the tests.
struct OmegaMatrix {
  int m = 0;
  Eigen::MatrixXd full;  // 2m x 2m, symmetric PSD

  Eigen::Block<const Eigen::MatrixXd> re_block() const { return full.block(0, 0, m, m); }
  Eigen::Block<const Eigen::MatrixXd> im_block() const { return full.block(m, m, m, m); }
  Eigen::Block<const Eigen::MatrixXd> ri_block() const { return full.block(0, m, m, m); }
};

OmegaMatrix omega(const StableParams& params, const EcfGrid& grid);

}  // namespace substable
