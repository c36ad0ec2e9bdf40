#pragma once

#include <Eigen/Dense>

#include "substable/estimators.hpp"
#include "substable/sample_matrix.hpp"
#include "substable/stable_params.hpp"

namespace substable {

/// Fixed evaluation grid for the moment vector: p x (p^2 + p) columns laid
/// out as (s1 e_1 .. s1 e_p | s2 e_1 .. s2 e_p | r+ | r-), where the r+/r-
/// columns are e_i + e_j and e_i - e_j ordered by pack_index(i, j).
struct EcfGrid {
  int p = 0;
  FrequencyPair fp;
  Eigen::MatrixXd columns;

  int m() const { return static_cast<int>(columns.cols()); }
  int offdiag_count() const { return p * (p - 1) / 2; }
};

EcfGrid build_grid(int p, const FrequencyPair& fp);

/// Moment vector theta of length 2m: Re phi at every grid column, then
/// Im phi at every grid column. The exact-parameter overload gives theta_0,
/// the sample overload gives theta_hat_n.
Eigen::VectorXd moment_vector(const StableParams& params, const EcfGrid& grid);
Eigen::VectorXd moment_vector(const SampleMatrix& sample, const EcfGrid& grid);

}  // namespace substable
