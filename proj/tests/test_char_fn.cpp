#include <doctest.h>

#include <cmath>
#include <complex>

#include "substable/char_fn.hpp"
#include "substable/rng.hpp"

using namespace substable;

namespace {

StableParams make_params(double alpha, const Eigen::VectorXd& mu,
                         const Eigen::MatrixXd& sigma) {
  return StableParams(alpha, mu, PackedSymmetric::from_dense(sigma));
}

}  // namespace

TEST_CASE("cf_theoretical at pinned points") {
  SUBCASE("phi(0) = 1") {
    const auto params =
        make_params(1.2, Eigen::Vector2d(0.4, -1.0), Eigen::MatrixXd::Identity(2, 2));
    const auto phi = cf_theoretical(params, Eigen::Vector2d(0.0, 0.0));
    CHECK(phi.real() == doctest::Approx(1.0));
    CHECK(phi.imag() == doctest::Approx(0.0));
  }
  SUBCASE("alpha=1, sigma=2I, t=e1 gives exp(-1)") {
    const auto params = make_params(1.0, Eigen::Vector2d::Zero(),
                                    2.0 * Eigen::MatrixXd::Identity(2, 2));
    const auto phi = cf_theoretical(params, Eigen::Vector2d(1.0, 0.0));
    CHECK(phi.real() == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(phi.imag() == doctest::Approx(0.0));
  }
  SUBCASE("alpha=0.5, mu=(1,0), sigma=I, t=e1: modulus exp(-0.5^0.25), argument 1") {
    const auto params =
        make_params(0.5, Eigen::Vector2d(1.0, 0.0), Eigen::MatrixXd::Identity(2, 2));
    const auto phi = cf_theoretical(params, Eigen::Vector2d(1.0, 0.0));
    CHECK(std::abs(phi) ==
          doctest::Approx(std::exp(-std::pow(0.5, 0.25))).epsilon(1e-14));
    CHECK(std::arg(phi) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("cf modulus depends on t only through the quadratic form") {
  const auto params = make_params(1.3, Eigen::Vector3d::Zero(),
                                  0.7 * Eigen::MatrixXd::Identity(3, 3));
  StreamRng rng({11, 0});
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Vector3d t;
    for (int k = 0; k < 3; ++k) t[k] = 2.0 * rng.uniform01() - 1.0;
    const double radius = t.norm();
    Eigen::Vector3d u;
    for (int k = 0; k < 3; ++k) u[k] = rng.normal();
    u = radius * u.normalized();  // same level set of t'(cI)t
    const double mt = std::abs(cf_theoretical(params, t));
    const double mu_ = std::abs(cf_theoretical(params, u));
    CHECK(mt == doctest::Approx(mu_).epsilon(1e-12));
  }
}

TEST_CASE("ecf basics") {
  SUBCASE("single observation has modulus one") {
    Eigen::MatrixXd x(1, 2);
    x << 0.3, -0.7;
    const SampleMatrix sample(x);
    const Eigen::Vector2d t(1.3, 0.2);
    const auto phi = ecf(sample, t);
    CHECK(std::abs(phi) == doctest::Approx(1.0).epsilon(1e-15));
    const double arg = 1.3 * 0.3 + 0.2 * -0.7;
    CHECK(phi.real() == doctest::Approx(std::cos(arg)));
    CHECK(phi.imag() == doctest::Approx(std::sin(arg)));
  }
  SUBCASE("t = 0 gives exactly 1") {
    Eigen::MatrixXd x(3, 1);
    x << 1.0, 2.0, 3.0;
    const auto phi = ecf(SampleMatrix(x), Eigen::VectorXd::Zero(1));
    CHECK(phi.real() == 1.0);
    CHECK(phi.imag() == 0.0);
  }
  SUBCASE("opposite phases cancel") {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, M_PI;
    Eigen::VectorXd t(1);
    t << 1.0;
    const auto phi = ecf(SampleMatrix(x), t);
    CHECK(std::abs(phi) < 1e-15);
  }
  SUBCASE("dimension mismatch throws") {
    Eigen::MatrixXd x(2, 2);
    x.setZero();
    CHECK_THROWS_AS(ecf(SampleMatrix(x), Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);
  }
}

TEST_CASE("ecf conjugate symmetry is exact") {
  StreamRng rng({5, 3});
  Eigen::MatrixXd x(40, 3);
  for (int r = 0; r < 40; ++r) {
    for (int c = 0; c < 3; ++c) x(r, c) = 3.0 * rng.normal();
  }
  const SampleMatrix sample(x);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector3d t;
    for (int k = 0; k < 3; ++k) t[k] = 2.0 * rng.uniform01() - 1.0;
    const auto plus = ecf(sample, t);
    const auto minus = ecf(sample, (-t).eval());
    CHECK(minus.real() == plus.real());
    CHECK(minus.imag() == -plus.imag());
  }
}

TEST_CASE("ecf_batch agrees with the per-point loop") {
  StreamRng rng({17, 2});
  Eigen::MatrixXd x(100, 3);
  for (int r = 0; r < 100; ++r) {
    for (int c = 0; c < 3; ++c) x(r, c) = rng.normal();
  }
  const SampleMatrix sample(x);
  Eigen::MatrixXd grid(3, 24);
  for (int c = 0; c < 24; ++c) {
    for (int k = 0; k < 3; ++k) grid(k, c) = 2.0 * rng.uniform01() - 1.0;
  }
  grid.col(7) = grid.col(3);  // duplicated column duplicates output

  const auto batch = ecf_batch(sample, grid);
  REQUIRE(batch.size() == 24);
  for (int c = 0; c < 24; ++c) {
    const auto single = ecf(sample, grid.col(c));
    CHECK(std::abs(batch[c] - single) < 1e-14);
  }
  CHECK(batch[7] == batch[3]);

  const auto one = ecf_batch(sample, grid.leftCols(1));
  CHECK(one[0] == ecf(sample, grid.col(0)));
}

TEST_CASE("safe_log_modulus clamps degenerate moduli") {
  ClampCounter counter;
  CHECK(safe_log_modulus(std::exp(-1.0), &counter) == doctest::Approx(-1.0));
  CHECK(counter.events == 0);

  const double at_one = safe_log_modulus(1.0, &counter);
  CHECK(counter.events == 1);
  CHECK(at_one < 0.0);
  CHECK(at_one == doctest::Approx(std::log(1.0 - 1e-12)));

  const double at_zero = safe_log_modulus(0.0, &counter);
  CHECK(counter.events == 2);
  CHECK(at_zero == doctest::Approx(std::log(1e-300)));

  // Output is always strictly negative and finite.
  for (double m : {0.0, 1e-320, 0.1, 0.999999, 1.0, 1.5}) {
    const double value = safe_log_modulus(m);
    CHECK(std::isfinite(value));
    CHECK(value < 0.0);
  }
}
