#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "substable/char_fn.hpp"
#include "substable/monte_carlo.hpp"
#include "substable/sampler.hpp"

using namespace substable;

#include "support/mc_oracle.hpp"

namespace {

using substable::testing::laplace_stat;

double column_median(const SampleMatrix& sample, int k) {
  std::vector<double> column(sample.n());
  for (long j = 0; j < sample.n(); ++j) column[j] = sample.data()(j, k);
  std::nth_element(column.begin(), column.begin() + column.size() / 2, column.end());
  return column[column.size() / 2];
}

}  // namespace

TEST_CASE("positive stable subordinator satisfies its Laplace transform") {
  const long n = 200000;
  for (double alpha : {0.5, 1.0, 1.5}) {
    const double a = alpha / 2.0;
    const Eigen::VectorXd draws = sample_positive_stable(a, n, {314, 0});
    CHECK(draws.minCoeff() > 0.0);
    for (double gamma : {0.5, 1.0, 2.0}) {
      const auto stat = laplace_stat(draws, gamma);
      const double target = std::exp(-std::pow(gamma, a));
      INFO("alpha=", alpha, " gamma=", gamma, " mean=", stat.mean,
           " target=", target);
      CHECK(std::abs(stat.mean - target) < 4.0 * stat.se);
    }
  }
}

TEST_CASE("subordinator rejects alpha_half outside (0,1)") {
  CHECK_THROWS_AS(sample_positive_stable(0.0, 10, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(sample_positive_stable(1.0, 10, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(sample_positive_stable(-0.3, 10, {1, 0}), std::domain_error);
}

TEST_CASE("sampling is bit-reproducible per (seed, stream)") {
  const StableParams params(1.2, Eigen::VectorXd::Zero(3), sigma_equal_dependent());
  const SampleMatrix a = sample_subgaussian(params, 500, {7, 3});
  const SampleMatrix b = sample_subgaussian(params, 500, {7, 3});
  CHECK(a.data() == b.data());

  const SampleMatrix c = sample_subgaussian(params, 500, {7, 4});
  CHECK(a.data() != c.data());
  const SampleMatrix d = sample_subgaussian(params, 500, {8, 3});
  CHECK(a.data() != d.data());
}

TEST_CASE("degenerate sigma = 0 pins every observation at mu") {
  const Eigen::Vector2d mu(5.0, -3.0);
  const StableParams params(1.0, mu, PackedSymmetric(2));
  const SampleMatrix sample = sample_subgaussian(params, 100, {1, 0});
  for (long j = 0; j < sample.n(); ++j) {
    CHECK(sample.data()(j, 0) == 5.0);
    CHECK(sample.data()(j, 1) == -3.0);
  }
}

TEST_CASE("scale_factor reproduces sigma for semi-definite input") {
  Eigen::MatrixXd rank1(2, 2);
  rank1 << 1.0, 1.0, 1.0, 1.0;
  const PackedSymmetric sigma = PackedSymmetric::from_dense(rank1);
  const Eigen::MatrixXd factor = scale_factor(sigma);
  CHECK((factor * factor.transpose() - rank1).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(scale_factor(PackedSymmetric::from_dense(indefinite)),
                  std::domain_error);
}

TEST_CASE("sample ECF tracks the theoretical CF on every experiment matrix") {
  const long n = 20000;
  const double bound = 5.0 / std::sqrt(static_cast<double>(n));
  const PackedSymmetric sigmas[] = {sigma_equal_independent(), sigma_equal_dependent(),
                                    sigma_dominant_first(), sigma_large_scale(),
                                    sigma_small_scale()};
  std::uint64_t stream = 0;
  for (const auto& sigma : sigmas) {
    const StableParams params(1.0, Eigen::VectorXd::Zero(3), sigma);
    const SampleMatrix sample = sample_subgaussian(params, n, {2024, stream++});
    StreamRng tdraw({55, stream});
    for (int trial = 0; trial < 12; ++trial) {
      Eigen::Vector3d t;
      for (int k = 0; k < 3; ++k) t[k] = 2.0 * tdraw.uniform01() - 1.0;
      const auto empirical = ecf(sample, t);
      const auto exact = cf_theoretical(params, t);
      INFO("trial ", trial);
      CHECK(std::abs(empirical - exact) < bound);
    }
  }
}

TEST_CASE("marginals are symmetric alpha-stable with scale sqrt(Sigma_kk/2)") {
  const double alpha = 1.5;
  const StableParams params(alpha, Eigen::VectorXd::Zero(3), sigma_equal_dependent());
  const long n = 50000;
  const SampleMatrix sample = sample_subgaussian(params, n, {99, 0});
  const double bound = 5.0 / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < 3; ++k) {
    const double scale_pow = std::pow(params.sigma().diag()[k] / 2.0, alpha / 2.0);
    for (double s : {0.5, 1.0, 2.0}) {
      Eigen::Vector3d t = Eigen::Vector3d::Zero();
      t[k] = s;
      const double expected = std::exp(-std::pow(s, alpha) * scale_pow);
      CHECK(std::abs(std::abs(ecf(sample, t)) - expected) < bound);
    }
  }
}

TEST_CASE("the law of X - mu is symmetric: component medians vanish") {
  const Eigen::Vector3d mu(2.0, -1.0, 0.5);
  const StableParams params(1.0, mu, sigma_equal_dependent());
  const long n = 40000;
  const SampleMatrix sample = sample_subgaussian(params, n, {123, 1});
  for (int k = 0; k < 3; ++k) {
    const double scale = std::sqrt(params.sigma().diag()[k] / 2.0);
    const double median = column_median(sample, k) - mu[k];
    // Sample median of a symmetric law drifts at O(n^-1/2).
    CHECK(std::abs(median) < 10.0 * scale / std::sqrt(static_cast<double>(n)));
  }
}
