#pragma once

#include <Eigen/Dense>
#include <utility>

namespace substable {

/// Position of the sub-diagonal element (i, j) in the row-by-row packing
/// of the strict lower triangle, 1-based on both sides:
///
///   i  2  3  3  4  4  4  5  5  5  5
///   j  1  1  2  1  2  3  1  2  3  4
///   #  1  2  3  4  5  6  7  8  9 10
///
/// #(i, j) = i(i-1)/2 - (i-1) + j for i >= 2, 1 <= j <= i-1.
/// Throws std::out_of_range for indices outside the strict lower triangle.
int pack_index(int i, int j);

/// Inverse of pack_index: maps position k >= 1 back to its (i, j) pair.
std::pair<int, int> unpack_index(int k);

/// Symmetric p x p matrix stored as its diagonal plus the packed strict
/// lower triangle (ordered by pack_index). Immutable use is thread-safe.
class PackedSymmetric {
public:
  PackedSymmetric() = default;
  explicit PackedSymmetric(int dim);
  PackedSymmetric(Eigen::VectorXd diag, Eigen::VectorXd subdiag);

  /// Builds from a dense matrix; rejects non-square, non-finite or
  /// asymmetric (beyond 1e-12 relative) input.
  static PackedSymmetric from_dense(const Eigen::MatrixXd& dense);

  int dim() const { return static_cast<int>(diag_.size()); }
  const Eigen::VectorXd& diag() const { return diag_; }
  const Eigen::VectorXd& subdiag() const { return subdiag_; }

  /// Element access, 0-based, either triangle.
  double at(int i, int j) const;

  Eigen::MatrixXd to_dense() const;
  double trace() const { return diag_.sum(); }

  bool operator==(const PackedSymmetric& other) const {
    return diag_ == other.diag_ && subdiag_ == other.subdiag_;
  }

private:
  Eigen::VectorXd diag_;
  Eigen::VectorXd subdiag_;
};

struct PsdInfo {
  bool ok = false;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;  // 1e-10 * max(trace, 0)
};

/// True iff the smallest eigenvalue is >= -1e-10 * max(trace, 0).
PsdInfo psd_check(const PackedSymmetric& m);

/// Nearest-PSD projection: eigenvalues clipped at zero, recomposed.
/// Idempotent; a no-op (within round-off) on PSD input.
PackedSymmetric psd_project(const PackedSymmetric& m);

}  // namespace substable
