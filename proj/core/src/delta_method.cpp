#include "substable/delta_method.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "estimator_detail.hpp"

namespace substable {

namespace {

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct GridLayout {
  int p, pairs, m;
  explicit GridLayout(int p_)
      : p(p_), pairs(p_ * (p_ - 1) / 2), m(p_ * p_ + p_) {}
  int re_s1(int k) const { return k - 1; }            // k 1-based
  int re_s2(int k) const { return p + k - 1; }
  int re_plus(int h) const { return 2 * p + h - 1; }  // h = pack position
  int re_minus(int h) const { return 2 * p + pairs + h - 1; }
  int im(int re_col) const { return m + re_col; }
};

}  // namespace

Eigen::VectorXd g_map(const Eigen::VectorXd& theta, const FrequencyPair& fp, int p,
                      ClampCounter* counter) {
  validate_frequency_pair(fp);
  const GridLayout lay(p);
  if (theta.size() != 2 * lay.m) {
    throw std::invalid_argument("g_map: theta must have length 2(p^2+p)");
  }
  auto modulus = [&](int re_col) {
    return std::hypot(theta[re_col], theta[lay.im(re_col)]);
  };

  Eigen::VectorXd out(1 + p + lay.pairs);

  double alpha_sum = 0.0;
  for (int k = 1; k <= p; ++k) {
    const double l1 = safe_log_modulus(modulus(lay.re_s1(k)), counter);
    const double l2 = safe_log_modulus(modulus(lay.re_s2(k)), counter);
    alpha_sum += detail::alpha_from_log_moduli(l1, l2, fp, nullptr);
  }
  const double alpha_hat = detail::clamp_alpha(alpha_sum / p, nullptr);
  out[0] = alpha_hat;

  for (int j = 1; j <= p; ++j) {
    const double l1 = safe_log_modulus(modulus(lay.re_s1(j)), counter);
    out[j] = detail::sigma_diag_from_log_modulus(l1, fp.s1, alpha_hat);
  }
  for (int h = 1; h <= lay.pairs; ++h) {
    const double lp = safe_log_modulus(modulus(lay.re_plus(h)), counter);
    const double lm = safe_log_modulus(modulus(lay.re_minus(h)), counter);
    out[p + h] = detail::sigma_offdiag_from_log_moduli(lp, lm, alpha_hat);
  }
  return out;
}

std::vector<std::string> estimand_labels(int p) {
  std::vector<std::string> labels;
  labels.reserve(1 + p + p * (p - 1) / 2);
  labels.emplace_back("alpha");
  for (int i = 1; i <= p; ++i) {
    labels.push_back("Sigma" + std::to_string(i) + std::to_string(i));
  }
  for (int h = 1; h <= p * (p - 1) / 2; ++h) {
    const auto [i, j] = unpack_index(h);
    labels.push_back("Sigma" + std::to_string(i) + std::to_string(j));
  }
  return labels;
}

Eigen::MatrixXd jacobian_fd(const Eigen::VectorXd& theta0, const FrequencyPair& fp,
                            int p, double step) {
  const GridLayout lay(p);
  if (theta0.size() != 2 * lay.m) {
    throw std::invalid_argument("jacobian_fd: theta0 must have length 2(p^2+p)");
  }
  const int rows = 1 + p + lay.pairs;
  Eigen::MatrixXd jac(rows, 2 * lay.m);
  Eigen::VectorXd theta = theta0;

  for (int c = 0; c < 2 * lay.m; ++c) {
    const int pair = c % lay.m;
    auto perturbed_modulus = [&](double delta) {
      double re = theta0[pair], im = theta0[lay.m + pair];
      (c < lay.m ? re : im) += delta;
      return std::hypot(re, im);
    };
    // Step across the modulus clamp would differentiate a flat spot; fall
    // back to a one-sided difference into the interior.
    const bool up_ok = perturbed_modulus(step) < 1.0 - kLogModulusGap;
    const bool down_ok = perturbed_modulus(-step) < 1.0 - kLogModulusGap;

    Eigen::VectorXd g_hi, g_lo;
    double denom = 2.0 * step;
    if (up_ok && down_ok) {
      theta[c] = theta0[c] + step;
      g_hi = g_map(theta, fp, p);
      theta[c] = theta0[c] - step;
      g_lo = g_map(theta, fp, p);
    } else if (down_ok) {
      g_hi = g_map(theta0, fp, p);
      theta[c] = theta0[c] - step;
      g_lo = g_map(theta, fp, p);
      denom = step;
    } else {
      theta[c] = theta0[c] + step;
      g_hi = g_map(theta, fp, p);
      g_lo = g_map(theta0, fp, p);
      denom = step;
    }
    theta[c] = theta0[c];
    if (!g_hi.allFinite() || !g_lo.allFinite()) {
      throw std::runtime_error("jacobian_fd: g not finite under perturbation of "
                               "coordinate " + std::to_string(c));
    }
    jac.col(c) = (g_hi - g_lo) / denom;
  }
  return jac;
}

Eigen::MatrixXd jacobian_closed(const StableParams& params, const FrequencyPair& fp,
                                ClosedForm form) {
  validate_frequency_pair(fp);
  const int p = params.p();
  const GridLayout lay(p);
  const double alpha = params.alpha();
  const double lr = std::log(fp.s1 / fp.s2);
  const PackedSymmetric& sigma = params.sigma();
  const Eigen::VectorXd& mu = params.mu();

  for (int k = 0; k < p; ++k) {
    if (!(sigma.diag()[k] > 0.0)) {
      throw std::domain_error("jacobian_closed: component " + std::to_string(k + 1) +
                              " has a degenerate distribution (Sigma_" +
                              std::to_string(k + 1) + std::to_string(k + 1) + " = 0)");
    }
  }

  // Per-axis CF ingredients at s1 e_k and s2 e_k.
  Eigen::VectorXd log_mod1(p), log_mod2(p), mod1(p), mod2(p);
  Eigen::VectorXd a1(p), a2(p), re1(p), im1(p), re2(p), im2(p);
  for (int k = 0; k < p; ++k) {
    const double skk = sigma.diag()[k];
    log_mod1[k] = -std::pow(fp.s1 * fp.s1 * skk / 2.0, alpha / 2.0);
    log_mod2[k] = -std::pow(fp.s2 * fp.s2 * skk / 2.0, alpha / 2.0);
    mod1[k] = std::exp(log_mod1[k]);
    mod2[k] = std::exp(log_mod2[k]);
    a1[k] = 1.0 / (lr * log_mod1[k] * mod1[k]);
    a2[k] = -1.0 / (lr * log_mod2[k] * mod2[k]);
    re1[k] = std::cos(fp.s1 * mu[k]);
    im1[k] = std::sin(fp.s1 * mu[k]);
    re2[k] = std::cos(fp.s2 * mu[k]);
    im2[k] = std::sin(fp.s2 * mu[k]);
  }

  const bool corrected = form == ClosedForm::corrected;
  const double mean_factor = corrected ? 1.0 / p : 1.0;
  const int rows = 1 + p + lay.pairs;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(rows, 2 * lay.m);

  // alpha row: derivative of the two-point log-log inversion, averaged over
  // components when corrected.
  for (int k = 1; k <= p; ++k) {
    jac(0, lay.re_s1(k)) = mean_factor * a1[k - 1] * re1[k - 1];
    jac(0, lay.im(lay.re_s1(k))) = mean_factor * a1[k - 1] * im1[k - 1];
    jac(0, lay.re_s2(k)) = mean_factor * a2[k - 1] * re2[k - 1];
    jac(0, lay.im(lay.re_s2(k))) = mean_factor * a2[k - 1] * im2[k - 1];
  }

  // Diagonal-scale rows: direct term plus chain rule through alpha.
  for (int j = 1; j <= p; ++j) {
    const double sjj = sigma.diag()[j - 1];
    const double chain = -(sjj / alpha) * std::log(fp.s1 * fp.s1 * sjj / 2.0);
    const double direct = (2.0 * sjj / alpha) / (log_mod1[j - 1] * mod1[j - 1]);
    for (int k = 1; k <= p; ++k) {
      double via_s1;
      if (corrected) {
        via_s1 = chain * mean_factor * a1[k - 1];
      } else {
        // As printed: the off-diagonal block lacks the 1/alpha (and the
        // averaging factor), the s2 block lacks only the averaging factor.
        via_s1 = (j == k) ? chain * a1[k - 1] : alpha * chain * a1[k - 1];
      }
      const double via_s2 = chain * mean_factor * a2[k - 1];
      const double total_s1 = (j == k ? direct : 0.0) + via_s1;
      jac(j, lay.re_s1(k)) = total_s1 * re1[k - 1];
      jac(j, lay.im(lay.re_s1(k))) = total_s1 * im1[k - 1];
      jac(j, lay.re_s2(k)) = via_s2 * re2[k - 1];
      jac(j, lay.im(lay.re_s2(k))) = via_s2 * im2[k - 1];
    }
  }

  // Off-diagonal-scale rows: diagonal J+/J- blocks plus chain rule through
  // alpha on the s1/s2 columns.
  for (int h = 1; h <= lay.pairs; ++h) {
    const auto [i, j] = unpack_index(h);
    const double sii = sigma.diag()[i - 1];
    const double sjj = sigma.diag()[j - 1];
    const double sij = sigma.at(i - 1, j - 1);
    const double q_plus = 0.5 * sii + sij + 0.5 * sjj;
    const double q_minus = 0.5 * sii - sij + 0.5 * sjj;
    if (q_plus < 0.0 || q_minus < 0.0) {
      throw std::domain_error("jacobian_closed: sigma not PSD on e_i +/- e_j");
    }
    const double row_chain = -(xlogx(q_plus) - xlogx(q_minus)) / (2.0 * alpha);
    const int row = p + h;
    for (int k = 1; k <= p; ++k) {
      double via_s1 = row_chain * mean_factor * a1[k - 1];
      double via_s2 = row_chain * mean_factor * a2[k - 1];
      if (!corrected) {
        // As printed: sign flipped, no averaging factor.
        via_s1 = -row_chain * a1[k - 1];
        via_s2 = -row_chain * a2[k - 1];
      }
      jac(row, lay.re_s1(k)) = via_s1 * re1[k - 1];
      jac(row, lay.im(lay.re_s1(k))) = via_s1 * im1[k - 1];
      jac(row, lay.re_s2(k)) = via_s2 * re2[k - 1];
      jac(row, lay.im(lay.re_s2(k))) = via_s2 * im2[k - 1];
    }

    const double mod_plus = std::exp(-std::pow(q_plus, alpha / 2.0));
    const double mod_minus = std::exp(-std::pow(q_minus, alpha / 2.0));
    const double d_plus = -std::pow(q_plus, 1.0 - alpha / 2.0) / (alpha * mod_plus);
    const double d_minus = std::pow(q_minus, 1.0 - alpha / 2.0) / (alpha * mod_minus);
    const double phase_plus = mu[i - 1] + mu[j - 1];
    const double phase_minus = mu[i - 1] - mu[j - 1];
    jac(row, lay.re_plus(h)) = d_plus * std::cos(phase_plus);
    jac(row, lay.im(lay.re_plus(h))) = d_plus * std::sin(phase_plus);
    jac(row, lay.re_minus(h)) = d_minus * std::cos(phase_minus);
    jac(row, lay.im(lay.re_minus(h))) = d_minus * std::sin(phase_minus);
  }

  return jac;
}

namespace {

/// Blockwise deviation: relative on entries the FD Jacobian resolves
/// (|fd| > 1e-8), absolute (scaled by 1e-8) below that.
double block_deviation(const Eigen::MatrixXd& closed, const Eigen::MatrixXd& fd,
                       const std::vector<std::pair<int, int>>& cells) {
  double dev = 0.0;
  for (const auto& [r, c] : cells) {
    const double f = fd(r, c);
    const double d = std::abs(closed(r, c) - f);
    dev = std::max(dev, std::abs(f) > 1e-8 ? d / std::abs(f)
                                           : (d > 1e-8 ? d / 1e-8 : 0.0));
  }
  return dev;
}

}  // namespace

JacobianAudit audit_jacobian(const StableParams& params, const FrequencyPair& fp) {
  const int p = params.p();
  const GridLayout lay(p);
  const EcfGrid grid = build_grid(p, fp);
  const Eigen::VectorXd theta0 = moment_vector(params, grid);

  const double h = 1e-6;
  const Eigen::MatrixXd fd = jacobian_fd(theta0, fp, p, h);
  const Eigen::MatrixXd fd_half = jacobian_fd(theta0, fp, p, h / 2.0);
  const Eigen::MatrixXd corrected =
      jacobian_closed(params, fp, ClosedForm::corrected);
  const Eigen::MatrixXd printed =
      jacobian_closed(params, fp, ClosedForm::as_printed);

  JacobianAudit audit;
  {
    std::vector<std::pair<int, int>> all;
    for (int r = 0; r < fd.rows(); ++r) {
      for (int c = 0; c < fd.cols(); ++c) all.emplace_back(r, c);
    }
    audit.richardson_max_rel = block_deviation(fd_half, fd, all);
    audit.fd_self_consistent = audit.richardson_max_rel <= 1e-5;
  }

  auto add_block = [&](const std::string& name,
                       const std::vector<std::pair<int, int>>& cells) {
    JacobianAudit::Block block;
    block.name = name;
    block.rel_dev_corrected = block_deviation(corrected, fd, cells);
    block.rel_dev_printed = block_deviation(printed, fd, cells);
    block.printed_matches_fd = block.rel_dev_printed <= 1e-3;
    if (!block.printed_matches_fd) audit.discrepant_blocks.push_back(name);
    audit.blocks.push_back(block);
  };

  auto s_columns = [&](int k /*1-based*/) {
    return std::vector<int>{lay.re_s1(k), lay.im(lay.re_s1(k)), lay.re_s2(k),
                            lay.im(lay.re_s2(k))};
  };

  {  // alpha row over the s1/s2 columns
    std::vector<std::pair<int, int>> cells;
    for (int k = 1; k <= p; ++k) {
      for (int c : s_columns(k)) cells.emplace_back(0, c);
    }
    add_block("alpha row (A1, A2)", cells);
  }
  {  // B1 diagonal (b_d)
    std::vector<std::pair<int, int>> cells;
    for (int j = 1; j <= p; ++j) {
      cells.emplace_back(j, lay.re_s1(j));
      cells.emplace_back(j, lay.im(lay.re_s1(j)));
    }
    add_block("B1 diagonal (b_d)", cells);
  }
  if (p > 1) {  // B1 off-diagonal (b_1)
    std::vector<std::pair<int, int>> cells;
    for (int j = 1; j <= p; ++j) {
      for (int k = 1; k <= p; ++k) {
        if (j == k) continue;
        cells.emplace_back(j, lay.re_s1(k));
        cells.emplace_back(j, lay.im(lay.re_s1(k)));
      }
    }
    add_block("B1 off-diagonal (b_1)", cells);
  }
  {  // B2
    std::vector<std::pair<int, int>> cells;
    for (int j = 1; j <= p; ++j) {
      for (int k = 1; k <= p; ++k) {
        cells.emplace_back(j, lay.re_s2(k));
        cells.emplace_back(j, lay.im(lay.re_s2(k)));
      }
    }
    add_block("B2", cells);
  }
  if (lay.pairs > 0) {
    std::vector<std::pair<int, int>> j1, j2, jp, jm;
    for (int h2 = 1; h2 <= lay.pairs; ++h2) {
      const int row = p + h2;
      for (int k = 1; k <= p; ++k) {
        j1.emplace_back(row, lay.re_s1(k));
        j1.emplace_back(row, lay.im(lay.re_s1(k)));
        j2.emplace_back(row, lay.re_s2(k));
        j2.emplace_back(row, lay.im(lay.re_s2(k)));
      }
      for (int h3 = 1; h3 <= lay.pairs; ++h3) {
        jp.emplace_back(row, lay.re_plus(h3));
        jp.emplace_back(row, lay.im(lay.re_plus(h3)));
        jm.emplace_back(row, lay.re_minus(h3));
        jm.emplace_back(row, lay.im(lay.re_minus(h3)));
      }
    }
    add_block("J1", j1);
    add_block("J2", j2);
    add_block("J+", jp);
    add_block("J-", jm);
  }
  {  // structural zeros: alpha and Sigma_d rows over the r+/r- columns
    std::vector<std::pair<int, int>> cells;
    for (int row = 0; row <= p; ++row) {
      for (int h2 = 1; h2 <= lay.pairs; ++h2) {
        cells.emplace_back(row, lay.re_plus(h2));
        cells.emplace_back(row, lay.im(lay.re_plus(h2)));
        cells.emplace_back(row, lay.re_minus(h2));
        cells.emplace_back(row, lay.im(lay.re_minus(h2)));
      }
    }
    if (!cells.empty()) add_block("zero blocks (rows alpha, Sigma_d)", cells);
  }

  return audit;
}

std::string JacobianAudit::to_string() const {
  std::ostringstream out;
  out << "jacobian audit (finite differences are authoritative)\n";
  out << "  FD self-consistency (h vs h/2): max rel dev "
      << richardson_max_rel << (fd_self_consistent ? "  [ok]" : "  [FAIL]") << "\n";
  for (const auto& block : blocks) {
    out << "  block " << block.name << ": corrected vs FD "
        << block.rel_dev_corrected << ", as-printed vs FD "
        << block.rel_dev_printed
        << (block.printed_matches_fd ? "" : "  <- printed form disagrees") << "\n";
  }
  if (!discrepant_blocks.empty()) {
    out << "  suspected typos in the printed blocks:";
    for (const auto& name : discrepant_blocks) out << " [" << name << "]";
    out << "\n";
  }
  return out.str();
}

double normal_quantile(double prob) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::domain_error("normal_quantile: probability must lie in (0, 1)");
  }
  // Acklam's rational approximation, then one Halley refinement through the
  // exact CDF; accurate to full double precision.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (prob < plow) {
    const double q = std::sqrt(-2.0 * std::log(prob));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (prob <= 1.0 - plow) {
    const double q = prob - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - prob));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - prob;
  const double u = err * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

DeltaReport delta_covariance(const StableParams& params, const FrequencyPair& fp,
                             long n, JacobianMode mode, double level) {
  if (n < 1) throw std::invalid_argument("delta_covariance: n must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("delta_covariance: level must lie in (0, 1)");
  }
  const int p = params.p();
  const EcfGrid grid = build_grid(p, fp);
  const Eigen::VectorXd theta0 = moment_vector(params, grid);
  const OmegaMatrix om = omega(params, grid);
  const Eigen::MatrixXd jac = mode == JacobianMode::finite_difference
                                  ? jacobian_fd(theta0, fp, p)
                                  : jacobian_closed(params, fp);

  DeltaReport report;
  report.p = p;
  report.n = n;
  report.level = level;
  report.mode = mode;
  report.fp = fp;
  report.labels = estimand_labels(p);
  report.estimates = g_map(theta0, fp, p);
  report.covariance = jac * om.full * jac.transpose();
  report.covariance =
      ((report.covariance + report.covariance.transpose()) / 2.0).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(report.covariance,
                                                        Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig < -1e-8 * std::max(report.covariance.trace(), 0.0)) {
    throw std::runtime_error("delta_covariance: assembled covariance is not PSD");
  }

  const double z = normal_quantile((1.0 + level) / 2.0);
  const int dim = static_cast<int>(report.estimates.size());
  report.std_errors.resize(dim);
  report.ci_lower.resize(dim);
  report.ci_upper.resize(dim);
  for (int i = 0; i < dim; ++i) {
    report.std_errors[i] =
        std::sqrt(std::max(report.covariance(i, i), 0.0) / static_cast<double>(n));
    report.ci_lower[i] = report.estimates[i] - z * report.std_errors[i];
    report.ci_upper[i] = report.estimates[i] + z * report.std_errors[i];
  }
  return report;
}

}  // namespace substable
