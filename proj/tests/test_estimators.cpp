#include <doctest.h>

#include <cmath>
#include <vector>

#include "substable/estimators.hpp"
#include "substable/monte_carlo.hpp"
#include "substable/sampler.hpp"

using namespace substable;

namespace {

std::vector<PackedSymmetric> experiment_sigmas() {
  return {sigma_equal_independent(), sigma_equal_dependent(), sigma_dominant_first(),
          sigma_large_scale(),       sigma_small_scale(),     sigma_equal_dependent()};
}

}  // namespace

TEST_CASE("plug-in exactness: every estimator inverts the exact CF") {
  // The strongest typo detector in the module: composing each estimator
  // with the exact characteristic function must return the true parameter.
  const FrequencyPair fp;
  const Eigen::Vector3d mu(0.3, -0.2, 0.1);
  for (const auto& sigma : experiment_sigmas()) {
    for (double alpha : {0.5, 0.7, 1.0, 1.3, 1.5}) {
      const StableParams params(alpha, mu, sigma);
      const CharFnSource cf = cf_source(params);

      INFO("alpha=", alpha, " sigma11=", sigma.diag()[0]);
      CHECK(alpha_press(cf, 3, fp) == doctest::Approx(alpha).epsilon(1e-12));
      for (int k = 1; k <= 3; ++k) {
        CHECK(alpha_single(cf, 3, k, fp) == doctest::Approx(alpha).epsilon(1e-12));
      }
      const double am = alpha_mult(cf, 3, fp);
      CHECK(am == doctest::Approx(alpha).epsilon(1e-12));

      const Eigen::VectorXd diag =
          sigma_diag(cf, 3, am, Eigen::VectorXd::Constant(3, fp.s1));
      const Eigen::VectorXd offdiag = sigma_offdiag(cf, 3, am);
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(diag[i] - sigma.diag()[i]) < 1e-10);
      }
      for (int h = 0; h < 3; ++h) {
        CHECK(std::abs(offdiag[h] - sigma.subdiag()[h]) < 1e-10);
      }

      const MuEstimate mu_hat = mu_estimate(cf, 3, Eigen::VectorXd::Ones(3));
      CHECK(mu_hat.failed_components.empty());
      for (int k = 0; k < 3; ++k) {
        CHECK(std::abs(mu_hat.mu[k] - mu[k]) < 1e-12);
      }
    }
  }
}

TEST_CASE("off-diagonal estimator divisor: exact CF recovers Sigma21 = 0.04") {
  // The half-difference of the two quadratic forms is exactly Sigma_ij:
  // ((Sii/2 + Sij + Sjj/2) - (Sii/2 - Sij + Sjj/2)) / 2 = Sij.
  const StableParams params(1.0, Eigen::Vector3d::Zero(), sigma_equal_dependent());
  const Eigen::VectorXd offdiag = sigma_offdiag(cf_source(params), 3, 1.0);
  CHECK(offdiag[0] == doctest::Approx(0.04).epsilon(1e-12));  // (2,1)
  CHECK(offdiag[1] == doctest::Approx(0.01).epsilon(1e-12));  // (3,1)
  CHECK(offdiag[2] == doctest::Approx(0.02).epsilon(1e-12));  // (3,2)
}

TEST_CASE("alpha_mult equals the arithmetic mean of the single estimates") {
  const StableParams params(1.3, Eigen::Vector3d::Zero(), sigma_dominant_first());
  const SampleMatrix sample = sample_subgaussian(params, 2000, {21, 0});
  const FrequencyPair fp;
  double mean = 0.0;
  for (int k = 1; k <= 3; ++k) mean += alpha_single(sample, k, fp);
  mean /= 3.0;
  CHECK(alpha_mult(sample, fp) == mean);
}

TEST_CASE("alpha and sigma estimates are invariant under translation") {
  const StableParams params(1.0, Eigen::Vector3d::Zero(), sigma_equal_dependent());
  const SampleMatrix sample = sample_subgaussian(params, 5000, {77, 0});
  const SampleMatrix moved = sample.shifted(Eigen::Vector3d(17.0, -6.0, 2.5));
  const FrequencyPair fp;

  CHECK(alpha_press(sample, fp) ==
        doctest::Approx(alpha_press(moved, fp)).epsilon(1e-12));
  CHECK(alpha_mult(sample, fp) ==
        doctest::Approx(alpha_mult(moved, fp)).epsilon(1e-12));
  for (int k = 1; k <= 3; ++k) {
    CHECK(alpha_single(sample, k, fp) ==
          doctest::Approx(alpha_single(moved, k, fp)).epsilon(1e-12));
  }
  const double am = alpha_mult(sample, fp);
  const Eigen::VectorXd d0 = sigma_diag(sample, am, fp.s1);
  const Eigen::VectorXd d1 = sigma_diag(moved, am, fp.s1);
  const Eigen::VectorXd o0 = sigma_offdiag(sample, am);
  const Eigen::VectorXd o1 = sigma_offdiag(moved, am);
  for (int i = 0; i < 3; ++i) CHECK(d0[i] == doctest::Approx(d1[i]).epsilon(1e-12));
  for (int h = 0; h < 3; ++h) {
    CHECK(o0[h] == doctest::Approx(o1[h]).epsilon(5e-11));
  }
}

TEST_CASE("mu estimation") {
  SUBCASE("reflection-augmented sample gives exactly zero") {
    const StableParams params(1.2, Eigen::Vector2d::Zero(),
                              PackedSymmetric::from_dense(Eigen::MatrixXd::Identity(2, 2)));
    const SampleMatrix half = sample_subgaussian(params, 300, {5, 0});
    // Interleave x and -x so each pair's sine contributions cancel exactly
    // as they are accumulated.
    Eigen::MatrixXd doubled(600, 2);
    for (int j = 0; j < 300; ++j) {
      doubled.row(2 * j) = half.data().row(j);
      doubled.row(2 * j + 1) = -half.data().row(j);
    }
    const MuEstimate est = mu_estimate(SampleMatrix(doubled), Eigen::Vector2d(1.0, 1.0));
    CHECK(est.mu[0] == 0.0);
    CHECK(est.mu[1] == 0.0);
  }
  SUBCASE("branch violation is off by pi multiples; the auto scale recovers") {
    // mu_1 = 5 with M = 1 breaks |mu|/M < pi/2; arctan folds the angle back.
    const Eigen::Vector2d mu(5.0, 0.0);
    const StableParams params(1.0, mu,
                              PackedSymmetric::from_dense(8.0 * Eigen::MatrixXd::Identity(2, 2)));
    const long n = 10000;
    const SampleMatrix sample = sample_subgaussian(params, n, {31, 0});

    const MuEstimate naive = mu_estimate(sample, Eigen::Vector2d(1.0, 1.0));
    CHECK(std::abs(naive.mu[0] - 5.0) > 1.0);

    const Eigen::VectorXd m = auto_mu_scale(sample);
    CHECK(m[0] > 2.0 / M_PI * 5.0);  // branch condition restored
    const MuEstimate automatic = mu_estimate(sample, m);
    const double scale = std::sqrt(8.0 / 2.0);
    CHECK(std::abs(automatic.mu[0] - 5.0) <
          5.0 * m[0] * scale / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("estimate_all on a fixed-seed sample lands near the truth") {
  const StableParams params(1.0, Eigen::Vector3d::Zero(), sigma_equal_dependent());
  const SampleMatrix sample = sample_subgaussian(params, 10000, {2718, 0});
  const EstimationReport report = estimate_all(sample, FrequencyPair{});

  // Bounds are 5x the replication-study RMSEs at this (alpha, n).
  CHECK(std::abs(report.alpha_hat - 1.0) < 5.0 * 0.0143);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(report.sigma_hat.diag()[i] - 0.1) < 5.0 * 0.0035);
  }
  CHECK(std::abs(report.sigma_hat.subdiag()[0] - 0.04) < 5.0 * 0.0024);
  CHECK(std::abs(report.sigma_hat.subdiag()[1] - 0.01) < 5.0 * 0.0022);
  CHECK(std::abs(report.sigma_hat.subdiag()[2] - 0.02) < 5.0 * 0.0022);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(report.mu_hat[k]) < 0.05);
  CHECK(report.clamp_events == 0);
  CHECK_FALSE(report.alpha_clamped);
  CHECK(report.n == 10000);
}

TEST_CASE("estimate_all stays finite on a minimal two-observation sample") {
  Eigen::MatrixXd tiny(2, 3);
  tiny << 0.1, -0.4, 0.9, 1.3, 0.2, -0.5;
  const EstimationReport report = estimate_all(SampleMatrix(tiny), FrequencyPair{});
  CHECK(std::isfinite(report.alpha_hat));
  CHECK(report.sigma_hat.diag().allFinite());
  CHECK(report.sigma_hat.subdiag().allFinite());
  CHECK(report.mu_hat.allFinite());

  Eigen::MatrixXd one(1, 3);
  one << 0.1, -0.4, 0.9;
  CHECK_THROWS_AS(estimate_all(SampleMatrix(one), FrequencyPair{}),
                  std::invalid_argument);
}

TEST_CASE("degenerate constant sample trips the clamps and is flagged") {
  Eigen::MatrixXd constant(50, 2);
  constant.col(0).setConstant(1.0);
  constant.col(1).setConstant(-2.0);
  const EstimationReport report = estimate_all(SampleMatrix(constant), FrequencyPair{});
  CHECK(report.clamp_events > 0);
  CHECK(report.alpha_clamped);
  CHECK(report.alpha_hat == kAlphaMin);
}

TEST_CASE("options are honored and echoed") {
  const StableParams params(1.5, Eigen::Vector3d::Zero(), sigma_dominant_first());
  const SampleMatrix sample = sample_subgaussian(params, 4000, {11, 0});

  EstimateOptions options;
  options.method = AlphaMethod::press;
  EstimationReport press = estimate_all(sample, FrequencyPair{}, options);
  CHECK(press.alpha_hat == alpha_press(sample, FrequencyPair{}));
  CHECK(press.method == AlphaMethod::press);

  options.method = AlphaMethod::single;
  options.single_component = 2;
  EstimationReport single = estimate_all(sample, FrequencyPair{}, options);
  CHECK(single.alpha_hat == alpha_single(sample, 2, FrequencyPair{}));

  options.method = AlphaMethod::mult;
  options.rescale = true;
  EstimationReport rescaled = estimate_all(sample, FrequencyPair{}, options);
  CHECK(rescaled.rescaled);
  CHECK(std::isfinite(rescaled.alpha_hat));
  CHECK(std::abs(rescaled.alpha_hat - 1.5) < 0.35);

  options.rescale = false;
  options.psd_project = true;
  EstimationReport projected = estimate_all(sample, FrequencyPair{}, options);
  CHECK(projected.psd_projected);
  CHECK(psd_check(projected.sigma_hat).ok);

  options.psd_project = false;
  options.mu_scale = Eigen::Vector3d(2.0, 2.0, 2.0);
  EstimationReport scaled = estimate_all(sample, FrequencyPair{}, options);
  CHECK(scaled.mu_scale == Eigen::Vector3d(2.0, 2.0, 2.0));
}

TEST_CASE("frequency pair validation") {
  CHECK_THROWS_AS(validate_frequency_pair({1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate_frequency_pair({0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(validate_frequency_pair({1.0, -0.5}), std::invalid_argument);
  CHECK_NOTHROW(validate_frequency_pair({0.5, 1.0}));
}

TEST_CASE("alpha method names parse and print") {
  int k = 1;
  CHECK(parse_alpha_method("press", &k) == AlphaMethod::press);
  CHECK(parse_alpha_method("mult", &k) == AlphaMethod::mult);
  CHECK(parse_alpha_method("single:3", &k) == AlphaMethod::single);
  CHECK(k == 3);
  CHECK_THROWS_AS(parse_alpha_method("median", &k), std::invalid_argument);
  CHECK(alpha_method_name(AlphaMethod::single, 2) == "single:2");
}
