#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "substable/estimators.hpp"
#include "substable/packed_symmetric.hpp"

namespace substable {

/// Replication study over a grid of (alpha, sample size) cells with a fixed
/// scale matrix. Which estimands are tracked is selected per family.
struct ExperimentSpec {
  std::vector<double> alphas;
  std::vector<long> sample_sizes;
  int replications = 500;
  PackedSymmetric sigma;
  Eigen::VectorXd mu;  // empty = zeros
  FrequencyPair fp;
  std::uint64_t seed = 42;

  bool press = false;
  bool single = false;
  bool mult = false;
  bool sigma_d = false;
  bool sigma_nd = false;
  int single_component = 1;  // 1-based
};

void validate_experiment(const ExperimentSpec& spec);

/// One (alpha, n) cell: bias and RMSE per estimand, replication counts.
struct CellResult {
  double alpha = 0.0;
  long sample_size = 0;
  int replications = 0;
  int failures = 0;
  std::vector<std::string> labels;  // alpha_p, alpha_s, alpha_m, Sigma11, ...
  Eigen::VectorXd bias;
  Eigen::VectorXd rmse;
};

/// Per-replication estimator: receives the cell's sample and truth, returns
/// one value per label plus a failure flag. Exposed so the harness can be
/// self-tested with a synthetic estimator.
struct ReplicationOutput {
  Eigen::VectorXd estimates;
  bool failed = false;
};
using ReplicationFn = std::function<ReplicationOutput(
    const SampleMatrix& sample, const ExperimentSpec& spec, double truth_alpha)>;

/// Runs replications in parallel (worker count capped by SUBSTABLE_THREADS),
/// with stream r of cell c seeded as (c << 32) | r so results are identical
/// for any worker count. Replications whose estimates hit a degenerate-ECF
/// clamp are counted and excluded; a cell with more than 1% failures throws.
std::vector<CellResult> run_experiment(const ExperimentSpec& spec);
std::vector<CellResult> run_experiment_with(const ExperimentSpec& spec,
                                            const ReplicationFn& replicate);

enum class TableFormat { csv, markdown };

/// Renders cells in the tables' column layout: sample_size, alpha, then one
/// bias column per estimand (label_b) followed by one RMSE column (label_rm).
std::string emit_table(const std::vector<CellResult>& results, TableFormat format);

/// Bundled experiment configurations table2..table8 (alpha-estimator
/// comparisons on five scale matrices, then diagonal and off-diagonal scale
/// estimation). Throws std::invalid_argument for unknown names.
ExperimentSpec preset_experiment(const std::string& name);
std::vector<std::string> preset_names();

/// Scale matrices used by the presets (p = 3).
PackedSymmetric sigma_equal_independent();  // 0.1 * I
PackedSymmetric sigma_equal_dependent();    // 0.1 diagonal, mild correlation
PackedSymmetric sigma_dominant_first();     // one outstanding component
PackedSymmetric sigma_large_scale();        // entries x100
PackedSymmetric sigma_small_scale();        // entries x1e-2 .. 1e-3

/// Worker count: SUBSTABLE_THREADS if set and positive, else hardware
/// concurrency (minimum 1). Read per call.
int worker_count();

}  // namespace substable
