#include "substable/sample_matrix.hpp"

#include <stdexcept>
#include <utility>

namespace substable {

SampleMatrix::SampleMatrix(Eigen::MatrixXd data) : data_(std::move(data)) {
  if (data_.rows() < 1 || data_.cols() < 1) {
    throw std::invalid_argument("SampleMatrix: need n >= 1 and p >= 1");
  }
  if (!data_.allFinite()) {
    throw std::invalid_argument("SampleMatrix: entries must be finite");
  }
}

SampleMatrix SampleMatrix::shifted(const Eigen::VectorXd& offset) const {
  if (offset.size() != data_.cols()) {
    throw std::invalid_argument("SampleMatrix::shifted: offset length must equal p");
  }
  Eigen::MatrixXd out = data_;
  out.rowwise() += offset.transpose();
  return SampleMatrix(std::move(out));
}

}  // namespace substable
