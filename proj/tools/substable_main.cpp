// substable: simulate and estimate multivariate sub-Gaussian alpha-stable
// laws. Subcommands: sample, estimate, cov, bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "substable/delta_method.hpp"
#include "substable/estimators.hpp"
#include "substable/io.hpp"
#include "substable/monte_carlo.hpp"
#include "substable/sampler.hpp"
#include "substable/version.hpp"

namespace {

using substable::PackedSymmetric;

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string field;
  while (std::getline(in, field, ',')) values.push_back(std::stod(field));
  Eigen::VectorXd out(values.size());
  for (size_t i = 0; i < values.size(); ++i) out[static_cast<int>(i)] = values[i];
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

struct SampleArgs {
  double alpha = 1.5;
  std::string sigma_file;
  std::string mu_text;
  long n = 1000;
  std::uint64_t seed = 42;
  std::uint64_t stream = 0;
  std::string out;
};

int run_sample(const SampleArgs& args) {
  const PackedSymmetric sigma = substable::read_sigma_csv_file(args.sigma_file);
  Eigen::VectorXd mu = args.mu_text.empty() ? Eigen::VectorXd::Zero(sigma.dim())
                                            : parse_vector(args.mu_text);
  const substable::StableParams params(args.alpha, mu, sigma);
  const substable::SampleMatrix sample =
      substable::sample_subgaussian(params, args.n, {args.seed, args.stream});

  std::ostringstream mu_meta;
  for (int k = 0; k < mu.size(); ++k) mu_meta << (k ? "," : "") << mu[k];
  std::vector<std::string> meta = {
      std::string("substable sample v") + substable::kVersion,
      "seed=" + std::to_string(args.seed) + " stream=" + std::to_string(args.stream) +
          " alpha=" + std::to_string(args.alpha) + " n=" + std::to_string(args.n) +
          " mu=" + mu_meta.str() + " sigma_file=" + args.sigma_file,
  };
  std::ostringstream body;
  substable::write_sample_csv(body, sample, meta);
  write_text(args.out, body.str());
  return 0;
}

struct EstimateArgs {
  std::string input;
  double s1 = substable::FrequencyPair{}.s1;
  double s2 = substable::FrequencyPair{}.s2;
  std::string method = "mult";
  bool rescale = false;
  bool psd_project = false;
  std::string mu_scale = "auto";
  std::string out;
};

// Pull "key=value" tokens out of the input CSV's leading '#' lines so the
// report can echo the generating configuration (seed, stream, ...).
nlohmann::json csv_metadata(const std::string& path) {
  nlohmann::json meta = nlohmann::json::object();
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    std::stringstream fields(line.substr(1));
    std::string token;
    while (fields >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "seed" || key == "stream") {
        try {
          meta[key] = std::stoull(value);
        } catch (const std::exception&) {
        }
      }
    }
  }
  return meta;
}

int run_estimate(const EstimateArgs& args) {
  const substable::SampleMatrix sample = substable::read_sample_csv_file(args.input);
  substable::EstimateOptions options;
  options.method = substable::parse_alpha_method(args.method, &options.single_component);
  options.rescale = args.rescale;
  options.psd_project = args.psd_project;
  if (args.mu_scale != "auto") options.mu_scale = parse_vector(args.mu_scale);

  const substable::FrequencyPair fp{args.s1, args.s2};
  const substable::EstimationReport report =
      substable::estimate_all(sample, fp, options);

  std::cout << substable::format_human_report(report);
  nlohmann::json extra = csv_metadata(args.input);
  extra["input"] = args.input;
  const nlohmann::json j = substable::report_to_json(report, extra);
  if (args.out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    write_text(args.out, j.dump(2) + "\n");
  }
  return 0;
}

struct CovArgs {
  std::string report_file;
  double alpha = 0.0;
  std::string sigma_file;
  std::string mu_text;
  long n = 0;
  double s1 = substable::FrequencyPair{}.s1;
  double s2 = substable::FrequencyPair{}.s2;
  std::string jacobian = "fd";
  double level = 0.95;
  bool check = false;
  std::string out;
};

int run_cov(const CovArgs& args) {
  double alpha = args.alpha;
  std::optional<PackedSymmetric> sigma;
  Eigen::VectorXd mu;
  long n = args.n;
  substable::FrequencyPair fp{args.s1, args.s2};
  bool projected = false;
  std::string source = "flags";

  if (!args.report_file.empty()) {
    std::ifstream in(args.report_file);
    if (!in) throw std::invalid_argument("cannot open report: " + args.report_file);
    nlohmann::json j;
    in >> j;
    const substable::EstimationReport report = substable::report_from_json(j);
    alpha = report.alpha_hat;
    sigma = report.sigma_hat;
    if (!substable::psd_check(*sigma).ok) {
      sigma = substable::psd_project(*sigma);
      projected = true;
    }
    mu = report.mu_hat;
    if (n == 0) n = report.n;
    fp = report.fp;
    source = args.report_file;
  } else {
    if (args.sigma_file.empty()) {
      throw std::invalid_argument("cov: pass --report or both --alpha and --sigma-file");
    }
    sigma = substable::read_sigma_csv_file(args.sigma_file);
    mu = args.mu_text.empty() ? Eigen::VectorXd::Zero(sigma->dim())
                              : parse_vector(args.mu_text);
  }
  if (n <= 0) {
    throw std::invalid_argument("cov: sample size --n must be positive");
  }

  const substable::StableParams params(alpha, mu, *sigma);
  if (args.check) {
    std::cout << substable::audit_jacobian(params, fp).to_string();
  }
  const auto mode = args.jacobian == "closed"
                        ? substable::JacobianMode::closed_form
                        : substable::JacobianMode::finite_difference;
  const substable::DeltaReport report =
      substable::delta_covariance(params, fp, n, mode, args.level);
  nlohmann::json j = substable::delta_to_json(
      report, {{"params_source", source}, {"psd_projected", projected}});
  write_text(args.out, j.dump(2) + "\n");
  return 0;
}

struct BenchArgs {
  std::string preset;
  std::string spec_file;
  std::string sigma_file;
  std::vector<double> alphas;
  std::vector<long> sample_sizes;
  int replications = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double s1 = 0.0;
  double s2 = 0.0;
  std::string format = "csv";
  std::string out;
};

int run_bench(const BenchArgs& args) {
  substable::ExperimentSpec spec;
  if (!args.spec_file.empty()) {
    std::ifstream in(args.spec_file);
    if (!in) throw std::invalid_argument("cannot open spec: " + args.spec_file);
    nlohmann::json j;
    in >> j;
    spec = substable::experiment_from_json(j);
  } else if (!args.preset.empty()) {
    spec = substable::preset_experiment(args.preset);
  } else if (!args.sigma_file.empty()) {
    spec.sigma = substable::read_sigma_csv_file(args.sigma_file);
    spec.mu = Eigen::VectorXd::Zero(spec.sigma.dim());
    spec.press = spec.single = spec.mult = true;
    spec.alphas = {0.5, 1.0, 1.5};
    spec.sample_sizes = {100, 1000, 10000};
  } else {
    throw std::invalid_argument("bench: pass --preset, --spec, or --sigma-file");
  }
  if (!args.alphas.empty()) spec.alphas = args.alphas;
  if (!args.sample_sizes.empty()) spec.sample_sizes = args.sample_sizes;
  if (args.replications > 0) spec.replications = args.replications;
  if (args.seed_set) spec.seed = args.seed;
  if (args.s1 > 0.0) spec.fp.s1 = args.s1;
  if (args.s2 > 0.0) spec.fp.s2 = args.s2;

  const auto cells = substable::run_experiment(spec);
  const auto format = args.format == "markdown" ? substable::TableFormat::markdown
                                                : substable::TableFormat::csv;

  std::ostringstream body;
  std::ostringstream sigma_meta;
  substable::write_sigma_csv(sigma_meta, spec.sigma);
  std::string sigma_line = sigma_meta.str();
  for (auto& ch : sigma_line) {
    if (ch == '\n') ch = ';';
  }
  body << "# substable bench v" << substable::kVersion << "\n";
  body << "# seed=" << spec.seed << " replications=" << spec.replications
       << " s1=" << spec.fp.s1 << " s2=" << spec.fp.s2
       << (args.preset.empty() ? "" : " preset=" + args.preset) << "\n";
  body << "# sigma=" << sigma_line << "\n";
  body << substable::emit_table(cells, format);
  write_text(args.out, body.str());

  int total_failures = 0;
  for (const auto& cell : cells) total_failures += cell.failures;
  if (total_failures > 0) {
    std::cerr << "warning: " << total_failures
              << " replication(s) excluded as degenerate\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Gaussian alpha-stable simulation and CF-based estimation"};
  app.set_version_flag("--version", substable::kVersion);
  app.require_subcommand(1);

  SampleArgs sample_args;
  auto* sample_cmd = app.add_subcommand("sample", "draw i.i.d. observations");
  sample_cmd->add_option("--alpha", sample_args.alpha, "stability index in (0,2)")
      ->required();
  sample_cmd->add_option("--sigma-file", sample_args.sigma_file,
                         "dense p x p scale matrix CSV")->required();
  sample_cmd->add_option("--mu", sample_args.mu_text, "location, comma separated");
  sample_cmd->add_option("--n", sample_args.n, "observations")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "RNG seed");
  sample_cmd->add_option("--stream", sample_args.stream, "RNG stream index");
  sample_cmd->add_option("-o,--out", sample_args.out, "output CSV (default stdout)");

  EstimateArgs estimate_args;
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate (alpha, Sigma, mu)");
  estimate_cmd->add_option("--input", estimate_args.input, "sample CSV")->required();
  estimate_cmd->add_option("--s1", estimate_args.s1, "first frequency");
  estimate_cmd->add_option("--s2", estimate_args.s2, "second frequency");
  estimate_cmd->add_option("--alpha-method", estimate_args.method,
                           "press | single:k | mult");
  estimate_cmd->add_flag("--rescale", estimate_args.rescale,
                         "pre-estimate diagonal scales and re-run alpha");
  estimate_cmd->add_flag("--psd-project", estimate_args.psd_project,
                         "project Sigma estimate onto the PSD cone");
  estimate_cmd->add_option("--mu-M", estimate_args.mu_scale,
                           "branch scales for mu: auto or comma separated");
  estimate_cmd->add_option("-o,--out", estimate_args.out, "report JSON path");

  CovArgs cov_args;
  auto* cov_cmd = app.add_subcommand("cov", "delta-method covariance and CIs");
  cov_cmd->add_option("--report", cov_args.report_file, "EstimationReport JSON");
  cov_cmd->add_option("--alpha", cov_args.alpha, "stability index");
  cov_cmd->add_option("--sigma-file", cov_args.sigma_file, "scale matrix CSV");
  cov_cmd->add_option("--mu", cov_args.mu_text, "location, comma separated");
  cov_cmd->add_option("--n", cov_args.n, "sample size for standard errors");
  cov_cmd->add_option("--jacobian", cov_args.jacobian, "fd | closed");
  cov_cmd->add_option("--level", cov_args.level, "confidence level");
  cov_cmd->add_flag("--check", cov_args.check, "print the FD-vs-closed audit");
  cov_cmd->add_option("-o,--out", cov_args.out, "DeltaReport JSON path");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "bias/RMSE replication study");
  bench_cmd->add_option("--preset", bench_args.preset, "table2..table8");
  bench_cmd->add_option("--spec", bench_args.spec_file, "experiment JSON");
  bench_cmd->add_option("--sigma-file", bench_args.sigma_file, "scale matrix CSV");
  bench_cmd->add_option("--alphas", bench_args.alphas, "alpha values");
  bench_cmd->add_option("--sample-sizes", bench_args.sample_sizes, "sample sizes");
  bench_cmd->add_option("--replications", bench_args.replications, "replications");
  bench_cmd->add_option("--seed", bench_args.seed, "RNG seed")
      ->each([&](const std::string&) { bench_args.seed_set = true; });
  bench_cmd->add_option("--s1", bench_args.s1, "first frequency");
  bench_cmd->add_option("--s2", bench_args.s2, "second frequency");
  bench_cmd->add_option("--format", bench_args.format, "csv | markdown");
  bench_cmd->add_option("--out", bench_args.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  try {
    if (sample_cmd->parsed()) return run_sample(sample_args);
    if (estimate_cmd->parsed()) return run_estimate(estimate_args);
    if (cov_cmd->parsed()) return run_cov(cov_args);
    if (bench_cmd->parsed()) return run_bench(bench_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
