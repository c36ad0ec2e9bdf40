#pragma once

#include <Eigen/Dense>

#include "substable/rng.hpp"
#include "substable/sample_matrix.hpp"
#include "substable/stable_params.hpp"

namespace substable {

/// Draws from the positive (totally skewed) stable law with Laplace
/// transform E[exp(-g A)] = exp(-g^alpha_half) for g >= 0, via Kanter's
/// representation
///
///   A = sin(a U) sin((1-a) U)^((1-a)/a) / ( sin(U)^(1/a) W^((1-a)/a) ),
///
/// U ~ Uniform(0, pi), W ~ Exp(1), a = alpha_half in (0, 1).
/// All draws are strictly positive.
Eigen::VectorXd sample_positive_stable(double alpha_half, long n, RngSpec rng);

/// In-stream variant used when the subordinator is interleaved with other
/// draws.
double positive_stable_draw(double alpha_half, StreamRng& rng);

/// i.i.d. draws X_j = mu + sqrt(A_j) L z_j with Sigma = L L', z_j standard
/// Gaussian and A_j the subordinator above (a = alpha/2), so that the
/// sample's characteristic function matches the sub-Gaussian stable law of
/// `params`. Per observation the draw order is A_j first, then z_j.
SampleMatrix sample_subgaussian(const StableParams& params, long n, RngSpec rng);

/// Factor L with Sigma = L L': Cholesky when positive definite, falling
/// back to the symmetric eigendecomposition square root for semi-definite
/// input. Throws std::domain_error if Sigma fails the PSD check.
Eigen::MatrixXd scale_factor(const PackedSymmetric& sigma);

}  // namespace substable
