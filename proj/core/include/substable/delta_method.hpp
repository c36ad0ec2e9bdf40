#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "substable/ecf_grid.hpp"
#include "substable/omega.hpp"

namespace substable {

/// Re-expresses (alpha^mult, Sigma_d, Sigma_nd) purely as a function of the
/// moment vector theta (no sample access). g(theta_0) returns the true
/// parameters; g(theta_hat_n) returns the same numbers as estimate_all with
/// the mean-of-components alpha method.
Eigen::VectorXd g_map(const Eigen::VectorXd& theta, const FrequencyPair& fp, int p,
                      ClampCounter* counter = nullptr);

/// Labels for the estimand vector: "alpha", "Sigma11".."Sigmapp",
/// then "Sigma21", "Sigma31", ... in pack_index order.
std::vector<std::string> estimand_labels(int p);

/// Numerical Jacobian of g at theta0, central differences with step h per
/// coordinate. Falls back to a one-sided difference when a perturbation
/// would push a modulus across the clamp boundary.
Eigen::MatrixXd jacobian_fd(const Eigen::VectorXd& theta0, const FrequencyPair& fp,
                            int p, double step = 1e-6);

/// Which closed-form Jacobian to assemble. `corrected` carries the chain
/// rule through the mean-of-components alpha (1/p factors and signs that
/// the finite-difference Jacobian confirms); `as_printed` reproduces the
/// uncorrected block formulas for auditing.
enum class ClosedForm { corrected, as_printed };

Eigen::MatrixXd jacobian_closed(const StableParams& params, const FrequencyPair& fp,
                                ClosedForm form = ClosedForm::corrected);

struct JacobianAudit {
  struct Block {
    std::string name;
    double rel_dev_corrected = 0.0;  // corrected closed form vs FD
    double rel_dev_printed = 0.0;    // as-printed form vs FD
    bool printed_matches_fd = false;
  };
  std::vector<Block> blocks;
  double richardson_max_rel = 0.0;  // FD(h) vs FD(h/2) agreement
  bool fd_self_consistent = false;
  std::vector<std::string> discrepant_blocks;  // printed form disagrees with FD

  std::string to_string() const;
};

/// Compares the finite-difference Jacobian against both closed forms,
/// block by block, and runs the h vs h/2 self-consistency check.
JacobianAudit audit_jacobian(const StableParams& params, const FrequencyPair& fp);

enum class JacobianMode { finite_difference, closed_form };

struct DeltaReport {
  int p = 0;
  long n = 0;
  double level = 0.95;
  JacobianMode mode = JacobianMode::finite_difference;
  FrequencyPair fp;

  std::vector<std::string> labels;
  Eigen::VectorXd estimates;    // (alpha, Sigma_d, Sigma_nd)
  Eigen::MatrixXd covariance;   // asymptotic covariance of sqrt(n)(hat - true)
  Eigen::VectorXd std_errors;   // sqrt(diag / n)
  Eigen::VectorXd ci_lower;
  Eigen::VectorXd ci_upper;
};

/// Delta-method limiting covariance G Omega G' of
/// sqrt(n) (alpha^mult - alpha, Sigma_d_hat - Sigma_d, Sigma_nd_hat - Sigma_nd),
/// with per-parameter standard errors and two-sided normal confidence
/// intervals at the given level.
DeltaReport delta_covariance(const StableParams& params, const FrequencyPair& fp,
                             long n, JacobianMode mode = JacobianMode::finite_difference,
                             double level = 0.95);

/// Standard normal quantile (inverse CDF), accurate to double precision.
double normal_quantile(double prob);

}  // namespace substable
