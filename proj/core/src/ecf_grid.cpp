#include "substable/ecf_grid.hpp"

#include <stdexcept>

#include "substable/char_fn.hpp"

namespace substable {

EcfGrid build_grid(int p, const FrequencyPair& fp) {
  if (p < 1) throw std::invalid_argument("build_grid: p must be >= 1");
  validate_frequency_pair(fp);

  const int pairs = p * (p - 1) / 2;
  EcfGrid grid;
  grid.p = p;
  grid.fp = fp;
  grid.columns = Eigen::MatrixXd::Zero(p, p * p + p);

  for (int k = 0; k < p; ++k) {
    grid.columns(k, k) = fp.s1;
    grid.columns(k, p + k) = fp.s2;
  }
  // r+ / r- columns ordered by pack_index(i, j); iterating i then j walks
  // the positions 1, 2, 3, ... consecutively.
  int c = 2 * p;
  for (int i = 2; i <= p; ++i) {
    for (int j = 1; j < i; ++j, ++c) {
      grid.columns(i - 1, c) = 1.0;
      grid.columns(j - 1, c) = 1.0;
      grid.columns(i - 1, c + pairs) = 1.0;
      grid.columns(j - 1, c + pairs) = -1.0;
    }
  }
  return grid;
}

Eigen::VectorXd moment_vector(const StableParams& params, const EcfGrid& grid) {
  if (params.p() != grid.p) {
    throw std::invalid_argument("moment_vector: parameter dimension does not match grid");
  }
  const int m = grid.m();
  Eigen::VectorXd theta(2 * m);
  for (int c = 0; c < m; ++c) {
    const std::complex<double> phi = cf_theoretical(params, grid.columns.col(c));
    theta[c] = phi.real();
    theta[m + c] = phi.imag();
  }
  return theta;
}

Eigen::VectorXd moment_vector(const SampleMatrix& sample, const EcfGrid& grid) {
  if (sample.p() != grid.p) {
    throw std::invalid_argument("moment_vector: sample dimension does not match grid");
  }
  const int m = grid.m();
  const auto values = ecf_batch(sample, grid.columns);
  Eigen::VectorXd theta(2 * m);
  for (int c = 0; c < m; ++c) {
    theta[c] = values[c].real();
    theta[m + c] = values[c].imag();
  }
  return theta;
}

}  // namespace substable
