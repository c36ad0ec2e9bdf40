#include "substable/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "substable/version.hpp"

namespace substable {

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& what) {
  std::vector<double> values;
  std::stringstream row(line);
  std::string field;
  while (std::getline(row, field, ',')) {
    try {
      size_t used = 0;
      values.push_back(std::stod(field, &used));
    } catch (const std::exception&) {
      throw std::invalid_argument(what + ": cannot parse '" + field + "' as a number");
    }
  }
  return values;
}

bool skip_line(const std::string& line) {
  return line.empty() || line[0] == '#' || line == "\r";
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return in;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  Eigen::VectorXd out(j.size());
  for (size_t i = 0; i < j.size(); ++i) out[static_cast<int>(i)] = j[i].get<double>();
  return out;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

SampleMatrix read_sample_csv(std::istream& in) {
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  size_t width = 0;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    if (!header_seen) {
      header_seen = true;  // x1..xp header row
      continue;
    }
    std::vector<double> row = parse_csv_row(line, "sample CSV");
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw std::invalid_argument("sample CSV: ragged row (expected " +
                                  std::to_string(width) + " fields)");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("sample CSV: no observations");
  Eigen::MatrixXd data(rows.size(), width);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < width; ++c) data(r, c) = rows[r][c];
  }
  return SampleMatrix(std::move(data));
}

SampleMatrix read_sample_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_sample_csv(in);
}

void write_sample_csv(std::ostream& out, const SampleMatrix& sample,
                      const std::vector<std::string>& meta_lines) {
  for (const auto& meta : meta_lines) out << "# " << meta << "\n";
  for (int c = 0; c < sample.p(); ++c) {
    out << (c == 0 ? "" : ",") << "x" << (c + 1);
  }
  out << "\n";
  out << std::setprecision(17);
  for (long r = 0; r < sample.n(); ++r) {
    for (int c = 0; c < sample.p(); ++c) {
      out << (c == 0 ? "" : ",") << sample.data()(r, c);
    }
    out << "\n";
  }
}

PackedSymmetric read_sigma_csv(std::istream& in) {
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (skip_line(line)) continue;
    rows.push_back(parse_csv_row(line, "sigma CSV"));
  }
  if (rows.empty()) throw std::invalid_argument("sigma CSV: empty matrix");
  const size_t p = rows.size();
  Eigen::MatrixXd dense(p, p);
  for (size_t r = 0; r < p; ++r) {
    if (rows[r].size() != p) {
      throw std::invalid_argument("sigma CSV: matrix must be square");
    }
    for (size_t c = 0; c < p; ++c) dense(r, c) = rows[r][c];
  }
  return PackedSymmetric::from_dense(dense);
}

PackedSymmetric read_sigma_csv_file(const std::string& path) {
  auto in = open_or_throw(path);
  return read_sigma_csv(in);
}

void write_sigma_csv(std::ostream& out, const PackedSymmetric& sigma) {
  const Eigen::MatrixXd dense = sigma.to_dense();
  out << std::setprecision(17);
  for (int r = 0; r < dense.rows(); ++r) {
    for (int c = 0; c < dense.cols(); ++c) {
      out << (c == 0 ? "" : ",") << dense(r, c);
    }
    out << "\n";
  }
}

nlohmann::json packed_to_json(const PackedSymmetric& m) {
  return {{"dim", m.dim()},
          {"diag", vector_to_json(m.diag())},
          {"subdiag", vector_to_json(m.subdiag())}};
}

PackedSymmetric packed_from_json(const nlohmann::json& j) {
  const int dim = j.at("dim").get<int>();
  Eigen::VectorXd diag = vector_from_json(j.at("diag"));
  Eigen::VectorXd subdiag = vector_from_json(j.at("subdiag"));
  if (diag.size() != dim) {
    throw std::invalid_argument("packed matrix JSON: diag length != dim");
  }
  return PackedSymmetric(std::move(diag), std::move(subdiag));
}

nlohmann::json report_to_json(const EstimationReport& report,
                              const nlohmann::json& extra_meta) {
  nlohmann::json meta = {
      {"version", kVersion},
      {"s1", report.fp.s1},
      {"s2", report.fp.s2},
      {"method", alpha_method_name(report.method, report.single_component)},
      {"n", report.n},
  };
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) {
    meta[it.key()] = it.value();
  }
  return {
      {"estimates",
       {{"alpha", report.alpha_hat},
        {"sigma", packed_to_json(report.sigma_hat)},
        {"mu", vector_to_json(report.mu_hat)}}},
      {"diagnostics",
       {{"clamp_events", report.clamp_events},
        {"alpha_clamped", report.alpha_clamped},
        {"psd_projected", report.psd_projected},
        {"rescaled", report.rescaled},
        {"mu_scale", vector_to_json(report.mu_scale)},
        {"mu_failed_components", report.mu_failed_components}}},
      {"meta", meta},
  };
}

EstimationReport report_from_json(const nlohmann::json& j) {
  EstimationReport report;
  const auto& est = j.at("estimates");
  report.alpha_hat = est.at("alpha").get<double>();
  report.sigma_hat = packed_from_json(est.at("sigma"));
  report.mu_hat = vector_from_json(est.at("mu"));
  const auto& meta = j.at("meta");
  report.fp.s1 = meta.value("s1", FrequencyPair{}.s1);
  report.fp.s2 = meta.value("s2", FrequencyPair{}.s2);
  report.n = meta.value("n", 0L);
  report.method = parse_alpha_method(meta.value("method", std::string("mult")),
                                     &report.single_component);
  if (j.contains("diagnostics")) {
    const auto& diag = j.at("diagnostics");
    report.clamp_events = diag.value("clamp_events", 0L);
    report.alpha_clamped = diag.value("alpha_clamped", false);
    report.psd_projected = diag.value("psd_projected", false);
    report.rescaled = diag.value("rescaled", false);
    if (diag.contains("mu_scale")) report.mu_scale = vector_from_json(diag["mu_scale"]);
  }
  return report;
}

nlohmann::json delta_to_json(const DeltaReport& report,
                             const nlohmann::json& extra_meta) {
  nlohmann::json estimates = nlohmann::json::object();
  nlohmann::json std_errors = nlohmann::json::object();
  nlohmann::json ci = nlohmann::json::object();
  for (size_t i = 0; i < report.labels.size(); ++i) {
    const auto idx = static_cast<int>(i);
    estimates[report.labels[i]] = report.estimates[idx];
    std_errors[report.labels[i]] = report.std_errors[idx];
    ci[report.labels[i]] = {report.ci_lower[idx], report.ci_upper[idx]};
  }
  nlohmann::json meta = {
      {"version", kVersion},
      {"s1", report.fp.s1},
      {"s2", report.fp.s2},
      {"n", report.n},
      {"level", report.level},
      {"jacobian",
       report.mode == JacobianMode::finite_difference ? "fd" : "closed"},
  };
  for (auto it = extra_meta.begin(); it != extra_meta.end(); ++it) {
    meta[it.key()] = it.value();
  }
  return {
      {"labels", report.labels},
      {"estimates", estimates},
      {"covariance", matrix_to_json(report.covariance)},
      {"std_errors", std_errors},
      {"ci", ci},
      {"meta", meta},
  };
}

ExperimentSpec experiment_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("preset")) {
    spec = preset_experiment(j.at("preset").get<std::string>());
  }
  if (j.contains("alphas")) {
    spec.alphas = j.at("alphas").get<std::vector<double>>();
  }
  if (j.contains("sample_sizes")) {
    spec.sample_sizes = j.at("sample_sizes").get<std::vector<long>>();
  }
  if (j.contains("replications")) spec.replications = j.at("replications").get<int>();
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("s1")) spec.fp.s1 = j.at("s1").get<double>();
  if (j.contains("s2")) spec.fp.s2 = j.at("s2").get<double>();
  if (j.contains("sigma")) spec.sigma = packed_from_json(j.at("sigma"));
  if (j.contains("mu")) spec.mu = vector_from_json(j.at("mu"));
  if (j.contains("estimators")) {
    spec.press = spec.single = spec.mult = spec.sigma_d = spec.sigma_nd = false;
    for (const auto& name : j.at("estimators")) {
      const std::string text = name.get<std::string>();
      if (text == "press") {
        spec.press = true;
      } else if (text == "mult") {
        spec.mult = true;
      } else if (text == "sigma_d") {
        spec.sigma_d = true;
      } else if (text == "sigma_nd") {
        spec.sigma_nd = true;
      } else if (text.rfind("single", 0) == 0) {
        spec.single = true;
        if (text.size() > 7 && text[6] == ':') {
          spec.single_component = std::stoi(text.substr(7));
        }
      } else {
        throw std::invalid_argument("experiment JSON: unknown estimator '" + text + "'");
      }
    }
  }
  return spec;
}

std::string format_human_report(const EstimationReport& report) {
  std::ostringstream out;
  out << "estimates (n = " << report.n << ", method = "
      << alpha_method_name(report.method, report.single_component)
      << ", s1 = " << report.fp.s1 << ", s2 = " << report.fp.s2 << ")\n";
  out << std::setprecision(6);
  out << "  alpha  " << report.alpha_hat;
  if (report.alpha_clamped) out << "  [clamped]";
  out << "\n";
  const Eigen::MatrixXd sigma = report.sigma_hat.to_dense();
  for (int r = 0; r < sigma.rows(); ++r) {
    out << (r == 0 ? "  sigma  " : "         ");
    for (int c = 0; c < sigma.cols(); ++c) out << std::setw(12) << sigma(r, c);
    out << "\n";
  }
  out << "  mu     ";
  for (int k = 0; k < report.mu_hat.size(); ++k) {
    out << std::setw(12) << report.mu_hat[k];
  }
  out << "\n";
  if (!report.mu_failed_components.empty()) {
    out << "  warning: mu estimation failed for components:";
    for (int k : report.mu_failed_components) out << " " << k;
    out << "\n";
  }
  if (report.clamp_events > 0) {
    out << "  warning: " << report.clamp_events << " degenerate ECF clamp event(s)\n";
  }
  return out.str();
}

}  // namespace substable
