#include <doctest.h>

#include <cstdlib>
#include <string>

#include "substable/monte_carlo.hpp"

using namespace substable;

namespace {

ExperimentSpec small_alpha_spec() {
  ExperimentSpec spec;
  spec.alphas = {1.0};
  spec.sample_sizes = {200};
  spec.replications = 40;
  spec.sigma = sigma_equal_dependent();
  spec.mu = Eigen::VectorXd::Zero(3);
  spec.seed = 7;
  spec.press = spec.single = spec.mult = true;
  return spec;
}

struct ThreadsGuard {
  std::string saved;
  bool had = false;
  ThreadsGuard() {
    if (const char* env = std::getenv("SUBSTABLE_THREADS")) {
      saved = env;
      had = true;
    }
  }
  ~ThreadsGuard() {
    if (had) {
      setenv("SUBSTABLE_THREADS", saved.c_str(), 1);
    } else {
      unsetenv("SUBSTABLE_THREADS");
    }
  }
};

}  // namespace

TEST_CASE("harness self-test: the identity estimator has zero bias and RMSE") {
  ExperimentSpec spec = small_alpha_spec();
  spec.replications = 2;
  const auto cells = run_experiment_with(
      spec, [](const SampleMatrix&, const ExperimentSpec& sp, double truth_alpha) {
        ReplicationOutput out;
        out.estimates.resize(3);
        out.estimates.setConstant(truth_alpha);
        return out;
      });
  REQUIRE(cells.size() == 1);
  CHECK(cells[0].bias.cwiseAbs().maxCoeff() == 0.0);
  CHECK(cells[0].rmse.maxCoeff() == 0.0);
  CHECK(cells[0].replications == 2);
  CHECK(cells[0].failures == 0);
}

TEST_CASE("rmse dominates bias in every cell") {
  const auto cells = run_experiment(small_alpha_spec());
  for (const auto& cell : cells) {
    for (int i = 0; i < cell.bias.size(); ++i) {
      CHECK(cell.rmse[i] >= std::abs(cell.bias[i]) - 1e-15);
    }
  }
}

TEST_CASE("failed replications are counted, excluded, and capped at 1%") {
  ExperimentSpec spec = small_alpha_spec();
  spec.replications = 300;
  int calls = 0;
  const auto cells = run_experiment_with(
      spec, [&calls](const SampleMatrix&, const ExperimentSpec&, double truth_alpha) {
        ReplicationOutput out;
        out.estimates.resize(3);
        out.estimates.setConstant(truth_alpha + 0.5);
        out.failed = (++calls % 150 == 0);  // 2 of 300
        return out;
      });
  CHECK(cells[0].failures == 2);
  CHECK(cells[0].replications == 298);
  CHECK(cells[0].bias[0] == doctest::Approx(0.5));

  ThreadsGuard guard;
  setenv("SUBSTABLE_THREADS", "1", 1);  // deterministic call order for the counter
  ExperimentSpec bad = small_alpha_spec();
  bad.replications = 100;
  CHECK_THROWS_AS(run_experiment_with(
                      bad,
                      [](const SampleMatrix&, const ExperimentSpec&, double) {
                        ReplicationOutput out;
                        out.estimates = Eigen::VectorXd::Zero(3);
                        out.failed = true;  // every replication degenerate
                        return out;
                      }),
                  std::runtime_error);
}

TEST_CASE("results are identical for any worker count") {
  ThreadsGuard guard;
  ExperimentSpec spec = small_alpha_spec();
  spec.sample_sizes = {100, 300};

  setenv("SUBSTABLE_THREADS", "1", 1);
  const std::string serial = emit_table(run_experiment(spec), TableFormat::csv);
  setenv("SUBSTABLE_THREADS", "3", 1);
  const std::string threaded = emit_table(run_experiment(spec), TableFormat::csv);
  setenv("SUBSTABLE_THREADS", "8", 1);
  const std::string oversubscribed = emit_table(run_experiment(spec), TableFormat::csv);

  CHECK(serial == threaded);
  CHECK(serial == oversubscribed);
}

TEST_CASE("table emission") {
  SUBCASE("alpha-table header matches the reference column layout") {
    const auto cells = run_experiment(small_alpha_spec());
    const std::string csv = emit_table(cells, TableFormat::csv);
    CHECK(csv.rfind("sample_size,alpha,alpha_p_b,alpha_s_b,alpha_m_b,"
                    "alpha_p_rm,alpha_s_rm,alpha_m_rm\n", 0) == 0);
  }
  SUBCASE("empty results produce the bare header") {
    CHECK(emit_table({}, TableFormat::csv) == "sample_size,alpha\n");
  }
  SUBCASE("markdown rows carry four decimals") {
    CellResult cell;
    cell.alpha = 1.0;
    cell.sample_size = 100;
    cell.labels = {"alpha_m"};
    cell.bias = Eigen::VectorXd::Constant(1, 0.12345678);
    cell.rmse = Eigen::VectorXd::Constant(1, 0.056789);
    const std::string md = emit_table({cell}, TableFormat::markdown);
    CHECK(md.find("| 0.1235 |") != std::string::npos);
    CHECK(md.find("| 0.0568 |") != std::string::npos);
    CHECK(md.find("alpha_m_b") != std::string::npos);
  }
  SUBCASE("sigma labels follow the packing order") {
    ExperimentSpec spec = small_alpha_spec();
    spec.press = spec.single = spec.mult = false;
    spec.sigma_d = spec.sigma_nd = true;
    spec.replications = 4;
    const auto cells = run_experiment(spec);
    const std::string csv = emit_table(cells, TableFormat::csv);
    CHECK(csv.rfind("sample_size,alpha,Sigma11_b,Sigma22_b,Sigma33_b,"
                    "Sigma21_b,Sigma31_b,Sigma32_b,Sigma11_rm,Sigma22_rm,Sigma33_rm,"
                    "Sigma21_rm,Sigma31_rm,Sigma32_rm\n", 0) == 0);
  }
}

TEST_CASE("scale-regime breakdown: x100 entries wreck every alpha estimator") {
  // With entries two orders of magnitude above the calibrated regime the
  // ECF at the evaluation frequencies is below the sampling noise floor,
  // so the estimates collapse toward zero: errors are roughly 100%.
  ExperimentSpec spec;
  spec.alphas = {1.5};
  spec.sample_sizes = {100};
  spec.replications = 50;
  spec.sigma = sigma_large_scale();
  spec.seed = 3;
  spec.press = spec.single = spec.mult = true;
  const auto cells = run_experiment(spec);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(cells[0].bias[i]) > 1.0);
  }
}

TEST_CASE("monotone consistency: RMSE shrinks as n grows") {
  ExperimentSpec spec;
  spec.alphas = {1.0};
  spec.sample_sizes = {100, 1000, 10000};
  spec.replications = 300;
  spec.sigma = sigma_equal_dependent();
  spec.seed = 11;
  spec.mult = true;
  const auto cells = run_experiment(spec);
  REQUIRE(cells.size() == 3);
  CHECK(cells[0].rmse[0] > cells[1].rmse[0]);
  CHECK(cells[1].rmse[0] > cells[2].rmse[0]);
}

TEST_CASE("experiment validation") {
  ExperimentSpec spec = small_alpha_spec();
  spec.replications = 1;
  CHECK_THROWS_AS(validate_experiment(spec), std::invalid_argument);

  spec = small_alpha_spec();
  spec.alphas = {2.5};
  CHECK_THROWS_AS(validate_experiment(spec), std::invalid_argument);

  spec = small_alpha_spec();
  spec.press = spec.single = spec.mult = false;
  CHECK_THROWS_AS(validate_experiment(spec), std::invalid_argument);

  spec = small_alpha_spec();
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  spec.sigma = PackedSymmetric::from_dense(indefinite);
  spec.mu = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(validate_experiment(spec), std::domain_error);
}

TEST_CASE("presets cover table2..table8") {
  CHECK(preset_names().size() == 7);
  for (const auto& name : preset_names()) {
    const ExperimentSpec spec = preset_experiment(name);
    CHECK_NOTHROW(validate_experiment(spec));
    CHECK(spec.replications == 500);
    CHECK(spec.alphas == std::vector<double>{0.5, 1.0, 1.5});
  }
  CHECK(preset_experiment("table7").sigma_d);
  CHECK(preset_experiment("table8").sigma_nd);
  CHECK_FALSE(preset_experiment("table8").press);
  CHECK_THROWS_AS(preset_experiment("table9"), std::invalid_argument);
}
