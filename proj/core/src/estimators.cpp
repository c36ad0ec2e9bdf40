#include "substable/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "estimator_detail.hpp"

namespace substable {

namespace {

Eigen::VectorXd unit_vector(int p, int k /*1-based*/, double scale = 1.0) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(p);
  e[k - 1] = scale;
  return e;
}

void check_component(int p, int k) {
  if (k < 1 || k > p) {
    throw std::invalid_argument("component index must lie in 1..p, got " +
                                std::to_string(k));
  }
}

void check_alpha_hat(double alpha_hat) {
  if (!(alpha_hat > 0.0 && alpha_hat <= 2.0)) {
    throw std::domain_error("alpha_hat must lie in (0, 2], got " +
                            std::to_string(alpha_hat));
  }
}

double median_inplace(std::vector<double>& v) {
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
  return 0.5 * (v[mid - 1] + hi);
}

}  // namespace

void validate_frequency_pair(const FrequencyPair& fp) {
  if (!(fp.s1 > 0.0) || !(fp.s2 > 0.0)) {
    throw std::invalid_argument("frequency pair: s1 and s2 must be > 0");
  }
  if (fp.s1 == fp.s2) {
    throw std::invalid_argument("frequency pair: s1 must differ from s2");
  }
}

CharFnSource ecf_source(const SampleMatrix& sample) {
  return [&sample](const Eigen::VectorXd& t) { return ecf(sample, t); };
}

CharFnSource cf_source(const StableParams& params) {
  return [&params](const Eigen::VectorXd& t) { return cf_theoretical(params, t); };
}

std::string alpha_method_name(AlphaMethod method, int single_component) {
  switch (method) {
    case AlphaMethod::press: return "press";
    case AlphaMethod::single: return "single:" + std::to_string(single_component);
    case AlphaMethod::mult: return "mult";
  }
  return "unknown";
}

AlphaMethod parse_alpha_method(const std::string& text, int* single_component) {
  if (text == "press") return AlphaMethod::press;
  if (text == "mult") return AlphaMethod::mult;
  if (text.rfind("single", 0) == 0) {
    int k = 1;
    if (text.size() > 7 && text[6] == ':') k = std::stoi(text.substr(7));
    if (single_component) *single_component = k;
    return AlphaMethod::single;
  }
  throw std::invalid_argument("unknown alpha method '" + text +
                              "' (expected press, single[:k], or mult)");
}

double alpha_press(const CharFnSource& cf, int p, const FrequencyPair& fp,
                   ClampCounter* counter, bool* clamped) {
  validate_frequency_pair(fp);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p);
  const double l1 = safe_log_modulus(cf(fp.s1 * ones), counter);
  const double l2 = safe_log_modulus(cf(fp.s2 * ones), counter);
  return detail::alpha_from_log_moduli(l1, l2, fp, clamped);
}

double alpha_press(const SampleMatrix& sample, const FrequencyPair& fp,
                   ClampCounter* counter, bool* clamped) {
  return alpha_press(ecf_source(sample), sample.p(), fp, counter, clamped);
}

double alpha_single(const CharFnSource& cf, int p, int k, const FrequencyPair& fp,
                    ClampCounter* counter, bool* clamped) {
  validate_frequency_pair(fp);
  check_component(p, k);
  const double l1 = safe_log_modulus(cf(unit_vector(p, k, fp.s1)), counter);
  const double l2 = safe_log_modulus(cf(unit_vector(p, k, fp.s2)), counter);
  return detail::alpha_from_log_moduli(l1, l2, fp, clamped);
}

double alpha_single(const SampleMatrix& sample, int k, const FrequencyPair& fp,
                    ClampCounter* counter, bool* clamped) {
  return alpha_single(ecf_source(sample), sample.p(), k, fp, counter, clamped);
}

double alpha_mult(const CharFnSource& cf, int p, const FrequencyPair& fp,
                  ClampCounter* counter, bool* clamped) {
  double sum = 0.0;
  for (int k = 1; k <= p; ++k) {
    sum += alpha_single(cf, p, k, fp, counter, clamped);
  }
  return detail::clamp_alpha(sum / p, clamped);
}

double alpha_mult(const SampleMatrix& sample, const FrequencyPair& fp,
                  ClampCounter* counter, bool* clamped) {
  return alpha_mult(ecf_source(sample), sample.p(), fp, counter, clamped);
}

Eigen::VectorXd sigma_diag(const CharFnSource& cf, int p, double alpha_hat,
                           const Eigen::VectorXd& s, ClampCounter* counter) {
  check_alpha_hat(alpha_hat);
  if (s.size() != p) {
    throw std::invalid_argument("sigma_diag: need one frequency per axis");
  }
  Eigen::VectorXd out(p);
  for (int i = 1; i <= p; ++i) {
    if (!(s[i - 1] > 0.0)) {
      throw std::invalid_argument("sigma_diag: frequencies must be > 0");
    }
    const double log_mod = safe_log_modulus(cf(unit_vector(p, i, s[i - 1])), counter);
    out[i - 1] = detail::sigma_diag_from_log_modulus(log_mod, s[i - 1], alpha_hat);
  }
  return out;
}

Eigen::VectorXd sigma_diag(const SampleMatrix& sample, double alpha_hat, double s,
                           ClampCounter* counter) {
  return sigma_diag(ecf_source(sample), sample.p(), alpha_hat,
                    Eigen::VectorXd::Constant(sample.p(), s), counter);
}

Eigen::VectorXd sigma_offdiag(const CharFnSource& cf, int p, double alpha_hat,
                              ClampCounter* counter) {
  check_alpha_hat(alpha_hat);
  Eigen::VectorXd out(p * (p - 1) / 2);
  for (int i = 2; i <= p; ++i) {
    for (int j = 1; j < i; ++j) {
      Eigen::VectorXd plus = unit_vector(p, i) + unit_vector(p, j);
      Eigen::VectorXd minus = unit_vector(p, i) - unit_vector(p, j);
      const double lp = safe_log_modulus(cf(plus), counter);
      const double lm = safe_log_modulus(cf(minus), counter);
      out[pack_index(i, j) - 1] =
          detail::sigma_offdiag_from_log_moduli(lp, lm, alpha_hat);
    }
  }
  return out;
}

Eigen::VectorXd sigma_offdiag(const SampleMatrix& sample, double alpha_hat,
                              ClampCounter* counter) {
  return sigma_offdiag(ecf_source(sample), sample.p(), alpha_hat, counter);
}

MuEstimate mu_estimate(const CharFnSource& cf, int p, const Eigen::VectorXd& scale) {
  if (scale.size() != p) {
    throw std::invalid_argument("mu_estimate: need one scale per component");
  }
  MuEstimate out;
  out.mu = Eigen::VectorXd::Zero(p);
  for (int k = 1; k <= p; ++k) {
    const double m = scale[k - 1];
    if (!(m > 0.0)) {
      throw std::invalid_argument("mu_estimate: scales must be > 0");
    }
    const std::complex<double> phi = cf(unit_vector(p, k, 1.0 / m));
    if (phi.real() == 0.0 || !std::isfinite(phi.real()) || !std::isfinite(phi.imag())) {
      out.failed_components.push_back(k);
      out.mu[k - 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    out.mu[k - 1] = m * std::atan(phi.imag() / phi.real());
  }
  return out;
}

MuEstimate mu_estimate(const SampleMatrix& sample, const Eigen::VectorXd& scale) {
  return mu_estimate(ecf_source(sample), sample.p(), scale);
}

Eigen::VectorXd auto_mu_scale(const SampleMatrix& sample) {
  const int p = sample.p();
  const long n = sample.n();
  Eigen::VectorXd out(p);
  std::vector<double> column(n);
  for (int k = 0; k < p; ++k) {
    for (long j = 0; j < n; ++j) column[j] = sample.data()(j, k);
    const double center = median_inplace(column);
    for (long j = 0; j < n; ++j) column[j] = std::abs(sample.data()(j, k) - center);
    const double mad = median_inplace(column);
    out[k] = std::max(1.0, 4.0 * mad);
  }
  return out;
}

EstimationReport estimate_all(const SampleMatrix& sample, const FrequencyPair& fp,
                              const EstimateOptions& options) {
  validate_frequency_pair(fp);
  if (sample.n() < 2) {
    throw std::invalid_argument("estimate_all: need at least two observations");
  }
  const int p = sample.p();
  ClampCounter counter;
  bool alpha_clamped = false;

  EstimationReport report;
  report.method = options.method;
  report.single_component = options.single_component;
  report.fp = fp;
  report.n = sample.n();

  const CharFnSource source = ecf_source(sample);
  auto alpha_by_method = [&](const CharFnSource& cf) {
    switch (options.method) {
      case AlphaMethod::press:
        return alpha_press(cf, p, fp, &counter, &alpha_clamped);
      case AlphaMethod::single:
        return alpha_single(cf, p, options.single_component, fp, &counter,
                            &alpha_clamped);
      case AlphaMethod::mult:
      default:
        return alpha_mult(cf, p, fp, &counter, &alpha_clamped);
    }
  };

  double alpha_hat = alpha_by_method(source);

  if (options.rescale) {
    // Equalize the components at their geometric-mean provisional
    // dispersion, then redo the mean-of-components alpha on the rescaled
    // data. Equalizing (rather than normalizing to 1) keeps the sample in
    // the dispersion regime the frequency pair is calibrated for.
    const Eigen::VectorXd provisional =
        sigma_diag(source, p, alpha_hat, Eigen::VectorXd::Constant(p, fp.s1), &counter);
    const double reference = std::exp(provisional.array().log().mean());
    Eigen::MatrixXd rescaled = sample.data();
    for (int k = 0; k < p; ++k) {
      rescaled.col(k) *= std::sqrt(reference / provisional[k]);
    }
    const SampleMatrix equalized(std::move(rescaled));
    alpha_hat = alpha_mult(equalized, fp, &counter, &alpha_clamped);
    report.rescaled = true;
  }

  const Eigen::VectorXd diag_freq =
      options.diag_frequencies.value_or(Eigen::VectorXd::Constant(p, fp.s1));
  Eigen::VectorXd diag = sigma_diag(source, p, alpha_hat, diag_freq, &counter);
  Eigen::VectorXd subdiag = p > 1 ? sigma_offdiag(source, p, alpha_hat, &counter)
                                  : Eigen::VectorXd(0);
  PackedSymmetric sigma_hat(std::move(diag), std::move(subdiag));
  if (options.psd_project) {
    sigma_hat = psd_project(sigma_hat);
    report.psd_projected = true;
  }

  report.mu_scale = options.mu_scale.value_or(auto_mu_scale(sample));
  MuEstimate mu = mu_estimate(source, p, report.mu_scale);

  report.alpha_hat = alpha_hat;
  report.sigma_hat = std::move(sigma_hat);
  report.mu_hat = std::move(mu.mu);
  report.mu_failed_components = std::move(mu.failed_components);
  report.clamp_events = counter.events;
  report.alpha_clamped = alpha_clamped;
  return report;
}

}  // namespace substable
