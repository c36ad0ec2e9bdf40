#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "substable/char_fn.hpp"
#include "substable/packed_symmetric.hpp"
#include "substable/sample_matrix.hpp"

namespace substable {

/// Pair of evaluation frequencies for the two-point log-log alpha
/// estimators. Both strictly positive, s1 != s2. The defaults are
/// calibrated for the bundled benchmark regime (scale entries near 0.1);
/// as a rule of thumb pick s so that s * sqrt(Sigma_kk / 2) is order one.
struct FrequencyPair {
  double s1 = 5.0;
  double s2 = 2.0;
};

void validate_frequency_pair(const FrequencyPair& fp);

/// Estimates of alpha are clamped into this range so the 2/alpha powers in
/// the scale estimators stay finite. Clamped results are flagged.
inline constexpr double kAlphaMin = 0.02;
inline constexpr double kAlphaMax = 2.0;

/// A characteristic-function source: either the ECF of a sample or the
/// exact CF of known parameters. Every estimator is defined against this
/// seam, which is what makes the plug-in exactness tests possible.
using CharFnSource = std::function<std::complex<double>(const Eigen::VectorXd&)>;

CharFnSource ecf_source(const SampleMatrix& sample);
CharFnSource cf_source(const StableParams& params);

enum class AlphaMethod { press, single, mult };

std::string alpha_method_name(AlphaMethod method, int single_component = 1);
AlphaMethod parse_alpha_method(const std::string& text, int* single_component);

/// Press estimator: log of the ratio of log-moduli at s1*e and s2*e,
/// e = (1, ..., 1), divided by log(s1/s2). Requires e'Sigma e != 0.
double alpha_press(const CharFnSource& cf, int p, const FrequencyPair& fp,
                   ClampCounter* counter = nullptr, bool* clamped = nullptr);
double alpha_press(const SampleMatrix& sample, const FrequencyPair& fp,
                   ClampCounter* counter = nullptr, bool* clamped = nullptr);

/// Single-component variant on the axis e_k (k is 1-based). Requires
/// Sigma_kk != 0.
double alpha_single(const CharFnSource& cf, int p, int k, const FrequencyPair& fp,
                    ClampCounter* counter = nullptr, bool* clamped = nullptr);
double alpha_single(const SampleMatrix& sample, int k, const FrequencyPair& fp,
                    ClampCounter* counter = nullptr, bool* clamped = nullptr);

/// Arithmetic mean of the p single-component estimates.
double alpha_mult(const CharFnSource& cf, int p, const FrequencyPair& fp,
                  ClampCounter* counter = nullptr, bool* clamped = nullptr);
double alpha_mult(const SampleMatrix& sample, const FrequencyPair& fp,
                  ClampCounter* counter = nullptr, bool* clamped = nullptr);

/// Diagonal scale estimates Sigma_ii = (2/s_i^2) (-log|phi(s_i e_i)|)^(2/alpha).
Eigen::VectorXd sigma_diag(const CharFnSource& cf, int p, double alpha_hat,
                           const Eigen::VectorXd& s, ClampCounter* counter = nullptr);
Eigen::VectorXd sigma_diag(const SampleMatrix& sample, double alpha_hat, double s,
                           ClampCounter* counter = nullptr);

/// Off-diagonal scale estimates, packed by pack_index:
/// Sigma_ij = [ (-log|phi(e_i+e_j)|)^(2/alpha) - (-log|phi(e_i-e_j)|)^(2/alpha) ] / 2.
Eigen::VectorXd sigma_offdiag(const CharFnSource& cf, int p, double alpha_hat,
                              ClampCounter* counter = nullptr);
Eigen::VectorXd sigma_offdiag(const SampleMatrix& sample, double alpha_hat,
                              ClampCounter* counter = nullptr);

struct MuEstimate {
  Eigen::VectorXd mu;
  std::vector<int> failed_components;  // 1-based; Re phi(e_k/M_k) == 0
};

/// Location estimates mu_k = M_k * arctan(Im phi / Re phi) at t = e_k/M_k.
/// Valid when |mu_k| / M_k < pi/2; otherwise off by multiples of pi.
MuEstimate mu_estimate(const CharFnSource& cf, int p, const Eigen::VectorXd& scale);
MuEstimate mu_estimate(const SampleMatrix& sample, const Eigen::VectorXd& scale);

/// Data-driven branch scale: M_k = max(1, 4 * median |x_k - median(x_k)|).
Eigen::VectorXd auto_mu_scale(const SampleMatrix& sample);

struct EstimateOptions {
  AlphaMethod method = AlphaMethod::mult;
  int single_component = 1;  // 1-based, used when method == single
  /// Pre-estimate the diagonal scales, rescale each component to unit
  /// provisional scale, then re-run the mean-of-components alpha.
  bool rescale = false;
  bool psd_project = false;
  /// Branch scales for the location estimator; empty = auto rule.
  std::optional<Eigen::VectorXd> mu_scale;
  /// Per-axis frequencies for the diagonal estimator; empty = s1 everywhere.
  std::optional<Eigen::VectorXd> diag_frequencies;
};

struct EstimationReport {
  double alpha_hat = 0.0;
  AlphaMethod method = AlphaMethod::mult;
  int single_component = 1;
  PackedSymmetric sigma_hat;
  Eigen::VectorXd mu_hat;
  std::vector<int> mu_failed_components;
  Eigen::VectorXd mu_scale;

  long clamp_events = 0;
  bool alpha_clamped = false;
  bool psd_projected = false;
  bool rescaled = false;

  FrequencyPair fp;
  long n = 0;
};

/// Full pipeline: alpha (per options), diagonal and off-diagonal scale,
/// location. Requires n >= 2.
EstimationReport estimate_all(const SampleMatrix& sample, const FrequencyPair& fp,
                              const EstimateOptions& options = {});

}  // namespace substable
