#include "substable/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "substable/sampler.hpp"
#include "substable/stable_params.hpp"

namespace substable {

namespace {

struct EstimandPlan {
  std::vector<std::string> labels;
  bool need_alpha_mult = false;
};

EstimandPlan make_plan(const ExperimentSpec& spec) {
  EstimandPlan plan;
  const int p = spec.sigma.dim();
  if (spec.press) plan.labels.emplace_back("alpha_p");
  if (spec.single) plan.labels.emplace_back("alpha_s");
  if (spec.mult) plan.labels.emplace_back("alpha_m");
  if (spec.sigma_d) {
    for (int i = 1; i <= p; ++i) {
      plan.labels.push_back("Sigma" + std::to_string(i) + std::to_string(i));
    }
  }
  if (spec.sigma_nd) {
    for (int h = 1; h <= p * (p - 1) / 2; ++h) {
      const auto [i, j] = unpack_index(h);
      plan.labels.push_back("Sigma" + std::to_string(i) + std::to_string(j));
    }
  }
  plan.need_alpha_mult = spec.mult || spec.sigma_d || spec.sigma_nd;
  if (plan.labels.empty()) {
    throw std::invalid_argument("experiment selects no estimators");
  }
  return plan;
}

Eigen::VectorXd cell_truth(const ExperimentSpec& spec, const EstimandPlan& plan,
                           double alpha) {
  Eigen::VectorXd truth(plan.labels.size());
  int idx = 0;
  if (spec.press) truth[idx++] = alpha;
  if (spec.single) truth[idx++] = alpha;
  if (spec.mult) truth[idx++] = alpha;
  if (spec.sigma_d) {
    for (int i = 0; i < spec.sigma.dim(); ++i) truth[idx++] = spec.sigma.diag()[i];
  }
  if (spec.sigma_nd) {
    for (int h = 0; h < spec.sigma.dim() * (spec.sigma.dim() - 1) / 2; ++h) {
      truth[idx++] = spec.sigma.subdiag()[h];
    }
  }
  return truth;
}

}  // namespace

void validate_experiment(const ExperimentSpec& spec) {
  if (spec.replications < 2) {
    throw std::invalid_argument("experiment: replications must be >= 2");
  }
  if (spec.alphas.empty() || spec.sample_sizes.empty()) {
    throw std::invalid_argument("experiment: need at least one alpha and one sample size");
  }
  for (double a : spec.alphas) {
    if (!(a > 0.0 && a < 2.0)) {
      throw std::invalid_argument("experiment: every alpha must lie in (0, 2)");
    }
  }
  for (long n : spec.sample_sizes) {
    if (n < 2) throw std::invalid_argument("experiment: sample sizes must be >= 2");
  }
  if (spec.sigma.dim() < 1) {
    throw std::invalid_argument("experiment: sigma is unset");
  }
  if (!psd_check(spec.sigma).ok) {
    throw std::domain_error("experiment: sigma is not positive semi-definite");
  }
  if (spec.mu.size() != 0 && spec.mu.size() != spec.sigma.dim()) {
    throw std::invalid_argument("experiment: mu dimension must match sigma");
  }
  validate_frequency_pair(spec.fp);
  make_plan(spec);  // throws when no estimator is selected
}

int worker_count() {
  if (const char* env = std::getenv("SUBSTABLE_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

std::vector<CellResult> run_experiment_with(const ExperimentSpec& spec,
                                            const ReplicationFn& replicate) {
  validate_experiment(spec);
  const EstimandPlan plan = make_plan(spec);
  const Eigen::VectorXd mu = spec.mu.size() > 0
                                 ? spec.mu
                                 : Eigen::VectorXd::Zero(spec.sigma.dim());
  const int workers = worker_count();
  const int reps = spec.replications;

  std::vector<CellResult> cells;
  std::uint64_t cell_index = 0;
  for (double alpha : spec.alphas) {
    const StableParams params(alpha, mu, spec.sigma);
    for (long n : spec.sample_sizes) {
      std::vector<ReplicationOutput> outputs(reps);
      std::exception_ptr first_error;
      std::atomic<bool> failed{false};

      auto run_range = [&](int worker) {
        try {
          for (int r = worker; r < reps; r += workers) {
            const RngSpec stream{spec.seed,
                                 (cell_index << 32) | static_cast<std::uint64_t>(r)};
            const SampleMatrix sample = sample_subgaussian(params, n, stream);
            outputs[r] = replicate(sample, spec, alpha);
          }
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
        }
      };

      if (workers <= 1 || reps <= 1) {
        run_range(0);
      } else {
        std::vector<std::thread> pool;
        const int active = std::min(workers, reps);
        pool.reserve(active);
        for (int w = 0; w < active; ++w) pool.emplace_back(run_range, w);
        for (auto& t : pool) t.join();
      }
      if (first_error) std::rethrow_exception(first_error);

      // Aggregate in replication order so the result is identical for any
      // worker count.
      const Eigen::VectorXd truth = cell_truth(spec, plan, alpha);
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(truth.size());
      Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(truth.size());
      int used = 0, failures = 0;
      for (int r = 0; r < reps; ++r) {
        if (outputs[r].failed) {
          ++failures;
          continue;
        }
        if (outputs[r].estimates.size() != truth.size()) {
          throw std::runtime_error("replication returned wrong number of estimates");
        }
        const Eigen::VectorXd err = outputs[r].estimates - truth;
        sum += err;
        sum_sq += err.cwiseProduct(err);
        ++used;
      }
      if (failures > reps / 100) {
        std::ostringstream msg;
        msg << "cell (alpha=" << alpha << ", n=" << n << ") failed: " << failures
            << " of " << reps << " replications degenerate (>1%)";
        throw std::runtime_error(msg.str());
      }
      if (used == 0) throw std::runtime_error("cell has no usable replications");

      CellResult cell;
      cell.alpha = alpha;
      cell.sample_size = n;
      cell.replications = used;
      cell.failures = failures;
      cell.labels = plan.labels;
      cell.bias = sum / used;
      cell.rmse = (sum_sq / used).cwiseSqrt();
      cells.push_back(std::move(cell));
      ++cell_index;
    }
  }
  return cells;
}

std::vector<CellResult> run_experiment(const ExperimentSpec& spec) {
  const EstimandPlan plan = make_plan(spec);
  auto replicate = [plan](const SampleMatrix& sample, const ExperimentSpec& sp,
                          double /*truth_alpha*/) {
    ReplicationOutput out;
    out.estimates.resize(plan.labels.size());
    ClampCounter counter;
    int idx = 0;
    if (sp.press) out.estimates[idx++] = alpha_press(sample, sp.fp, &counter);
    if (sp.single) {
      out.estimates[idx++] = alpha_single(sample, sp.single_component, sp.fp, &counter);
    }
    double am = 0.0;
    if (plan.need_alpha_mult) am = alpha_mult(sample, sp.fp, &counter);
    if (sp.mult) out.estimates[idx++] = am;
    if (sp.sigma_d) {
      const Eigen::VectorXd diag = sigma_diag(sample, am, sp.fp.s1, &counter);
      for (int i = 0; i < diag.size(); ++i) out.estimates[idx++] = diag[i];
    }
    if (sp.sigma_nd) {
      const Eigen::VectorXd sub = sigma_offdiag(sample, am, &counter);
      for (int i = 0; i < sub.size(); ++i) out.estimates[idx++] = sub[i];
    }
    // A clamp event means the ECF was degenerate at an evaluation point;
    // the raw estimate would not have been finite without it.
    out.failed = counter.events > 0 || !out.estimates.allFinite();
    return out;
  };
  return run_experiment_with(spec, replicate);
}

std::string emit_table(const std::vector<CellResult>& results, TableFormat format) {
  std::ostringstream out;
  const std::vector<std::string> labels =
      results.empty() ? std::vector<std::string>{} : results.front().labels;

  if (format == TableFormat::csv) {
    out << "sample_size,alpha";
    for (const auto& l : labels) out << "," << l << "_b";
    for (const auto& l : labels) out << "," << l << "_rm";
    out << "\n";
    for (const auto& cell : results) {
      out << cell.sample_size << "," << std::setprecision(6) << cell.alpha;
      out << std::fixed << std::setprecision(4);
      for (int i = 0; i < cell.bias.size(); ++i) out << "," << cell.bias[i];
      for (int i = 0; i < cell.rmse.size(); ++i) out << "," << cell.rmse[i];
      out.unsetf(std::ios_base::floatfield);
      out << "\n";
    }
    return out.str();
  }

  out << "| sample_size | alpha |";
  for (const auto& l : labels) out << " " << l << "_b |";
  for (const auto& l : labels) out << " " << l << "_rm |";
  out << "\n|";
  for (size_t i = 0; i < labels.size() * 2 + 2; ++i) out << " --- |";
  out << "\n";
  for (const auto& cell : results) {
    out << "| " << cell.sample_size << " | " << std::setprecision(6) << cell.alpha
        << " |" << std::fixed << std::setprecision(4);
    for (int i = 0; i < cell.bias.size(); ++i) out << " " << cell.bias[i] << " |";
    for (int i = 0; i < cell.rmse.size(); ++i) out << " " << cell.rmse[i] << " |";
    out.unsetf(std::ios_base::floatfield);
    out << "\n";
  }
  return out.str();
}

namespace {

PackedSymmetric dense3(double a11, double a21, double a31, double a22, double a32,
                       double a33) {
  Eigen::MatrixXd m(3, 3);
  m << a11, a21, a31, a21, a22, a32, a31, a32, a33;
  return PackedSymmetric::from_dense(m);
}

}  // namespace

PackedSymmetric sigma_equal_independent() {
  return dense3(0.1, 0.0, 0.0, 0.1, 0.0, 0.1);
}

PackedSymmetric sigma_equal_dependent() {
  return dense3(0.10, 0.04, 0.01, 0.10, 0.02, 0.10);
}

PackedSymmetric sigma_dominant_first() {
  return dense3(1.0, 0.04, 0.01, 0.10, 0.02, 0.10);
}

PackedSymmetric sigma_large_scale() {
  return dense3(10.0, 4.0, 1.0, 10.0, 2.0, 10.0);
}

PackedSymmetric sigma_small_scale() {
  return dense3(1e-3, 0.4e-3, 0.1e-3, 1e-3, 0.2e-3, 1e-3);
}

std::vector<std::string> preset_names() {
  return {"table2", "table3", "table4", "table5", "table6", "table7", "table8"};
}

ExperimentSpec preset_experiment(const std::string& name) {
  ExperimentSpec spec;
  spec.alphas = {0.5, 1.0, 1.5};
  spec.sample_sizes = {100, 1000, 10000};
  spec.replications = 500;
  spec.mu = Eigen::VectorXd::Zero(3);
  spec.fp = FrequencyPair{};
  spec.seed = 42;

  if (name == "table2") {
    spec.sigma = sigma_equal_independent();
    spec.press = spec.single = spec.mult = true;
  } else if (name == "table3") {
    spec.sigma = sigma_equal_dependent();
    spec.press = spec.single = spec.mult = true;
  } else if (name == "table4") {
    spec.sigma = sigma_dominant_first();
    spec.press = spec.single = spec.mult = true;
  } else if (name == "table5") {
    spec.sigma = sigma_large_scale();
    spec.press = spec.single = spec.mult = true;
  } else if (name == "table6") {
    spec.sigma = sigma_small_scale();
    spec.press = spec.single = spec.mult = true;
  } else if (name == "table7") {
    spec.sigma = sigma_equal_dependent();
    spec.sigma_d = true;
  } else if (name == "table8") {
    spec.sigma = sigma_equal_dependent();
    spec.sigma_nd = true;
  } else {
    throw std::invalid_argument("unknown preset '" + name +
                                "' (expected table2..table8)");
  }
  return spec;
}

}  // namespace substable
