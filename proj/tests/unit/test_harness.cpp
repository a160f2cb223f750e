#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bro/config.hpp"
#include "bro/error.hpp"
#include "bro/harness.hpp"

using namespace bro;

namespace {

ExperimentConfig newsvendor(std::size_t reps, std::size_t outer_m = 300) {
  auto cfg = parse_config(R"(problem:
  name: newsvendor_exp
risk:
  specs: [mean, "mean_variance:w=1", "var:alpha=0.9", "cvar:alpha=0.9"]
experiment:
  n_list: [100]
  x_list: [0.5, 1.0, 2.0]
  seed: 99
optimizer:
  grid_points: 41
)");
  cfg.replications = reps;
  cfg.outer_m = outer_m;
  return cfg;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("bro_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Harness, ConsistencyRowCountContract) {
  const auto cfg = newsvendor(1);
  const auto out = run_experiment(Command::Consistency, cfg);
  const auto dir = scratch("rows");
  const auto files = write_outputs(out, cfg, dir);
  EXPECT_EQ(line_count(slurp(files.csv)), cfg.x_list.size() * cfg.specs.size() + 1);
  EXPECT_EQ(files.csv.filename().string(), "consistency_" + cfg.hash_hex() + ".csv");
  EXPECT_TRUE(std::filesystem::exists(files.summary));
  for (const auto& r : out.rows) {
    EXPECT_EQ(r.seed, 99u);
    EXPECT_EQ(r.config_hash, cfg.hash_hex());
  }
}

TEST(Harness, WorkerCountDoesNotChangeOutput) {
  auto cfg = newsvendor(6);
  cfg.n_list = {50, 200};
  for (auto cmd : {Command::Consistency, Command::Coverage, Command::OptimalValue}) {
    cfg.workers = 1;
    const auto a = write_outputs(run_experiment(cmd, cfg), cfg, scratch("w1"));
    const auto sa = slurp(a.csv);
    cfg.workers = 4;
    const auto b = write_outputs(run_experiment(cmd, cfg), cfg, scratch("w4"));
    EXPECT_EQ(sa, slurp(b.csv)) << to_string(cmd);
  }
}

TEST(Harness, NormalityPredictedMeans) {
  auto cfg = newsvendor(100, 200);
  cfg.specs = {RiskSpec::mean(), RiskSpec::value_at_risk(0.95), RiskSpec::cvar(0.95)};
  cfg.x_list = {Decision::Constant(1, 1.0)};
  const auto out = run_experiment(Command::Normality, cfg);
  ASSERT_EQ(out.reports.size(), 3u);
  const double s = out.reports[0].sigma_x;
  EXPECT_NEAR(s, 0.7927233529713461, 1e-9);
  EXPECT_EQ(out.reports[0].report.predicted_mean, 0.0);
  EXPECT_NEAR(out.reports[1].report.predicted_mean, 1.6448536269514727 * s, 1e-12);
  EXPECT_NEAR(out.reports[2].report.predicted_mean, 2.062712807507426 * s, 1e-12);
  EXPECT_EQ(out.rows.size(), 300u);

  cfg.replications = 99;
  EXPECT_THROW((void)run_experiment(Command::Normality, cfg), ConfigError);
  cfg.replications = 100;
  cfg.x_list.clear();
  EXPECT_THROW((void)run_experiment(Command::Normality, cfg), ConfigError);
}

TEST(Harness, CoverageSummaryRows) {
  auto cfg = newsvendor(40);
  const auto out = run_experiment(Command::Coverage, cfg);
  const auto summary = summarize_coverage(out);
  EXPECT_EQ(summary.size(), cfg.x_list.size() * cfg.specs.size());
  EXPECT_EQ(out.rows.size(), 40 * summary.size() + summary.size());
  for (const auto& s : summary) {
    EXPECT_GE(s.coverage, 0.0);
    EXPECT_LE(s.coverage, 1.0);
  }
}

TEST(Harness, CoverageWithZeroSigma) {
  auto cfg = parse_config(R"(problem:
  name: linear_normal
risk:
  specs: [mean, "cvar:alpha=0.9"]
experiment:
  n_list: [50]
  replications: 5
  x_list: [0.0]
  seed: 3
)");
  for (const auto& s : summarize_coverage(run_experiment(Command::Coverage, cfg))) EXPECT_EQ(s.coverage, 1.0);
}

TEST(Harness, LowNominalLevelLowersCoverage) {
  auto cfg = newsvendor(300, 200);
  cfg.specs = {RiskSpec::mean()};
  cfg.x_list = {Decision::Constant(1, 1.0)};
  cfg.beta = 0.5;
  const auto cov = summarize_coverage(run_experiment(Command::Coverage, cfg));
  ASSERT_EQ(cov.size(), 1u);
  EXPECT_NEAR(cov[0].coverage, 0.5, 0.1);
}

TEST(Harness, OptimalValueRefusesNonSingleton) {
  auto cfg = newsvendor(2);
  cfg.problem.name = "linear_normal";
  cfg.x_list.clear();
  try {
    (void)run_experiment(Command::OptimalValue, cfg);
    FAIL() << "expected a refusal";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("singleton"), std::string::npos);
  }
}

TEST(Harness, SolveWithDataFile) {
  const auto dir = scratch("solve");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "data.txt");
    f << "# demand\n0.5 1.5, 2.0\n1.0\n";
  }
  auto cfg = newsvendor(1);
  cfg.data_file = (dir / "data.txt").string();
  cfg.optimizer.keep_trace = true;
  const auto out = run_experiment(Command::Solve, cfg);
  ASSERT_EQ(out.solves.size(), cfg.specs.size());
  EXPECT_EQ(out.rows[0].n, 4u);
  const auto files = write_outputs(out, cfg, dir / "out");
  ASSERT_TRUE(files.report_json.has_value());
  ASSERT_TRUE(files.trace_csv.has_value());
  EXPECT_NE(slurp(*files.report_json).find("\"status\""), std::string::npos);
}

TEST(Harness, ReadSamplesRejectsGarbage) {
  const auto dir = scratch("samples");
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "bad.txt");
    f << "1 2\n3 x4\n";
  }
  try {
    (void)read_samples(dir / "bad.txt");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos);
  }
}

TEST(Harness, RiskEval) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const std::vector<RiskSpec> specs{RiskSpec::cvar(0.6), RiskSpec::value_at_risk(1.0)};
  const auto out = run_risk_eval(specs, xs);
  ASSERT_EQ(out.rows.size(), 2u);
  EXPECT_NEAR(*out.rows[0].objective, 4.5, 1e-15);
  EXPECT_EQ(*out.rows[1].objective, 5.0);
  EXPECT_EQ(out.rows[0].config_hash, run_risk_eval(specs, xs).rows[0].config_hash);
}

TEST(Harness, ParallelForPropagatesErrors) {
  std::vector<int> hit(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 100);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t i) {
                 if (i == 7) throw DataError("boom");
               }),
               DataError);
}

TEST(Harness, CsvSchemaStable) {
  const auto header = RunRecord::csv_header();
  RunRecord r;
  const auto row = r.csv_row();
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST(Harness, VarMinusMeanMatchesBias) {
  // Over replications, VaR objective minus Mean objective averages to the
  // normal-quantile shift sigma_x * z_alpha / sqrt(n).
  auto cfg = newsvendor(1000, 2000);
  cfg.n_list = {400};
  cfg.specs = {RiskSpec::mean(), RiskSpec::value_at_risk(0.95)};
  cfg.x_list = {Decision::Constant(1, 1.0)};
  const auto out = run_experiment(Command::Normality, cfg);
  double diff = 0;
  for (std::size_t r = 0; r < cfg.replications; ++r) diff += *out.rows[2 * r + 1].objective - *out.rows[2 * r].objective;
  diff /= static_cast<double>(cfg.replications);
  const double bias = bias_term(RiskSpec::value_at_risk(0.95), out.reports[0].sigma_x, 400);
  EXPECT_NEAR(diff / bias, 1.0, 0.10);
}
