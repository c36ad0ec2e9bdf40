#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "substable/sample_matrix.hpp"
#include "substable/stable_params.hpp"

namespace substable {

/// Counts how often safe_log_modulus had to clamp a degenerate modulus.
struct ClampCounter {
  long events = 0;
};

inline constexpr double kLogModulusFloor = 1e-300;
inline constexpr double kLogModulusGap = 1e-12;  // keeps |phi| < 1

/// log of |phi| clamped into [1e-300, 1 - 1e-12]. Always finite and
/// strictly negative, so downstream log-of-log expressions stay defined.
double safe_log_modulus(double modulus, ClampCounter* counter = nullptr);
double safe_log_modulus(std::complex<double> phi, ClampCounter* counter = nullptr);

/// Characteristic function exp(i t'mu - (t'Sigma t / 2)^(alpha/2)).
/// Throws std::domain_error if t'Sigma t is negative beyond the PSD
/// tolerance (Sigma not PSD in direction t).
std::complex<double> cf_theoretical(const StableParams& params,
                                    const Eigen::VectorXd& t);

/// Empirical characteristic function (1/n) sum_j exp(i t'x_j).
std::complex<double> ecf(const SampleMatrix& sample, const Eigen::VectorXd& t);

/// ECF evaluated at every column of `grid` (p x m) in one pass over the
/// sample. Column k equals ecf(sample, grid.col(k)).
std::vector<std::complex<double>> ecf_batch(const SampleMatrix& sample,
                                            const Eigen::MatrixXd& grid);

}  // namespace substable
