#pragma once

#include <Eigen/Dense>

namespace substable {

/// n x p matrix of i.i.d. observations, one row per observation.
/// Entries must be finite; n >= 1, p >= 1.
class SampleMatrix {
public:
  explicit SampleMatrix(Eigen::MatrixXd data);

  const Eigen::MatrixXd& data() const { return data_; }
  long n() const { return static_cast<long>(data_.rows()); }
  int p() const { return static_cast<int>(data_.cols()); }

  /// Copy with the constant vector added to every row (used by the
  /// translation-invariance tests).
  SampleMatrix shifted(const Eigen::VectorXd& offset) const;

private:
  Eigen::MatrixXd data_;
};

}  // namespace substable
