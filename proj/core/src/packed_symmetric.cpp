#include "substable/packed_symmetric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace substable {

int pack_index(int i, int j) {
  if (i < 2 || j < 1 || j > i - 1) {
    throw std::out_of_range("pack_index: need i >= 2 and 1 <= j <= i-1, got (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
  }
  return i * (i - 1) / 2 - (i - 1) + j;
}

std::pair<int, int> unpack_index(int k) {
  if (k < 1) {
    throw std::out_of_range("unpack_index: position must be >= 1, got " +
                            std::to_string(k));
  }
  // Row i holds positions ((i-1)(i-2)/2, i(i-1)/2]; invert the quadratic
  // and fix up rounding.
  int i = static_cast<int>((1.0 + std::sqrt(1.0 + 8.0 * k)) / 2.0);
  while (i * (i - 1) / 2 < k) ++i;
  while ((i - 1) * (i - 2) / 2 >= k) --i;
  int j = k - (i - 1) * (i - 2) / 2;
  return {i, j};
}

PackedSymmetric::PackedSymmetric(int dim) {
  if (dim < 1) throw std::invalid_argument("PackedSymmetric: dim must be >= 1");
  diag_ = Eigen::VectorXd::Zero(dim);
  subdiag_ = Eigen::VectorXd::Zero(dim * (dim - 1) / 2);
}

PackedSymmetric::PackedSymmetric(Eigen::VectorXd diag, Eigen::VectorXd subdiag)
    : diag_(std::move(diag)), subdiag_(std::move(subdiag)) {
  const int p = static_cast<int>(diag_.size());
  if (p < 1) throw std::invalid_argument("PackedSymmetric: dim must be >= 1");
  if (subdiag_.size() != p * (p - 1) / 2) {
    throw std::invalid_argument("PackedSymmetric: subdiag length must be p(p-1)/2");
  }
}

PackedSymmetric PackedSymmetric::from_dense(const Eigen::MatrixXd& dense) {
  if (dense.rows() != dense.cols() || dense.rows() < 1) {
    throw std::invalid_argument("PackedSymmetric::from_dense: matrix must be square");
  }
  if (!dense.allFinite()) {
    throw std::invalid_argument("PackedSymmetric::from_dense: entries must be finite");
  }
  const double scale = dense.cwiseAbs().maxCoeff();
  const double asym = (dense - dense.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, scale)) {
    throw std::invalid_argument("PackedSymmetric::from_dense: matrix is not symmetric");
  }
  const int p = static_cast<int>(dense.rows());
  PackedSymmetric out(p);
  for (int i = 0; i < p; ++i) out.diag_[i] = dense(i, i);
  for (int i = 1; i < p; ++i) {
    for (int j = 0; j < i; ++j) {
      out.subdiag_[pack_index(i + 1, j + 1) - 1] = dense(i, j);
    }
  }
  return out;
}

double PackedSymmetric::at(int i, int j) const {
  const int p = dim();
  if (i < 0 || j < 0 || i >= p || j >= p) {
    throw std::out_of_range("PackedSymmetric::at: index out of range");
  }
  if (i == j) return diag_[i];
  const int lo = std::min(i, j), hi = std::max(i, j);
  return subdiag_[pack_index(hi + 1, lo + 1) - 1];
}


Eigen::MatrixXd PackedSymmetric::to_dense() const {
  const int p = dim();
  Eigen::MatrixXd out(p, p);
  for (int i = 0; i < p; ++i) {
    out(i, i) = diag_[i];
    for (int j = 0; j < i; ++j) {
      const double v = subdiag_[pack_index(i + 1, j + 1) - 1];
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

PsdInfo psd_check(const PackedSymmetric& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.to_dense(),
                                                        Eigen::EigenvaluesOnly);
  PsdInfo info;
  info.min_eigenvalue = solver.eigenvalues().minCoeff();
  info.tolerance = 1e-10 * std::max(m.trace(), 0.0);
  info.ok = info.min_eigenvalue >= -info.tolerance;
  return info;
}

PackedSymmetric psd_project(const PackedSymmetric& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.to_dense());
  Eigen::VectorXd clipped = solver.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd dense = solver.eigenvectors() * clipped.asDiagonal() *
                          solver.eigenvectors().transpose();
  dense = ((dense + dense.transpose()) / 2.0).eval();
  return PackedSymmetric::from_dense(dense);
}

}  // namespace substable
