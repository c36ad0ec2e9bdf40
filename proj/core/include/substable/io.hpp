#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "substable/delta_method.hpp"
#include "substable/estimators.hpp"
#include "substable/monte_carlo.hpp"
#include "substable/packed_symmetric.hpp"
#include "substable/sample_matrix.hpp"

namespace substable {

/// Sample CSV: optional leading '#' metadata lines, then a header row
/// x1..xp, then one observation per row.
SampleMatrix read_sample_csv(std::istream& in);
SampleMatrix read_sample_csv_file(const std::string& path);
void write_sample_csv(std::ostream& out, const SampleMatrix& sample,
                      const std::vector<std::string>& meta_lines = {});

/// Scale-matrix CSV: dense p x p, row-major, no header ('#' lines skipped).
PackedSymmetric read_sigma_csv(std::istream& in);
PackedSymmetric read_sigma_csv_file(const std::string& path);
void write_sigma_csv(std::ostream& out, const PackedSymmetric& sigma);

nlohmann::json packed_to_json(const PackedSymmetric& m);
PackedSymmetric packed_from_json(const nlohmann::json& j);

/// EstimationReport as JSON: {estimates, diagnostics, meta}.
nlohmann::json report_to_json(const EstimationReport& report,
                              const nlohmann::json& extra_meta = {});
EstimationReport report_from_json(const nlohmann::json& j);

/// DeltaReport as JSON: {params, estimates, covariance, std_errors, ci, meta}.
nlohmann::json delta_to_json(const DeltaReport& report,
                             const nlohmann::json& extra_meta = {});

/// ExperimentSpec from a JSON file (see README for the schema).
ExperimentSpec experiment_from_json(const nlohmann::json& j);

std::string format_human_report(const EstimationReport& report);

}  // namespace substable
