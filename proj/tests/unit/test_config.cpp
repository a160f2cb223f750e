#include <gtest/gtest.h>

#include <string>

#include "bro/config.hpp"
#include "bro/error.hpp"

using namespace bro;

namespace {

const char* kMinimal = R"(problem:
  name: newsvendor_exp
  theta_c: 1.5
risk:
  specs: [mean, "cvar:alpha=0.9"]
experiment:
  n_list: [10, 20]
  seed: 5
  x_list: [0.5, 1.0]
)";

std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ParsesMinimal) {
  const auto cfg = parse_config(kMinimal);
  EXPECT_EQ(cfg.problem.name, "newsvendor_exp");
  EXPECT_EQ(cfg.specs.size(), 2u);
  EXPECT_EQ(cfg.specs[1], RiskSpec::cvar(0.9));
  EXPECT_EQ(cfg.n_list, (std::vector<std::size_t>{10, 20}));
  EXPECT_EQ(cfg.x_list.size(), 2u);
  EXPECT_EQ(*cfg.seed, 5u);
  EXPECT_NO_THROW(cfg.validate());
  const auto pr = build_problem(cfg);
  EXPECT_NEAR((*pr.known_optimum)[0], std::log(3.0) / 1.5, 1e-15);
  EXPECT_EQ(build_prior(cfg, pr.family).kind_name(), "gamma");
}

TEST(Config, UnknownKeysNameSectionAndLine) {
  const auto msg = error_of("experiment:\n  n_list: [1]\n  seeds: 3\n");
  EXPECT_NE(msg.find("cfg.yaml:3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("seeds"), std::string::npos) << msg;
  EXPECT_NE(error_of("optimiser:\n  grid_points: 3\n").find("optimiser"), std::string::npos);
}

TEST(Config, TypeErrors) {
  EXPECT_NE(error_of("experiment:\n  replications: -4\n").find("experiment.replications"), std::string::npos);
  EXPECT_NE(error_of("experiment:\n  outer_m: lots\n").find("experiment.outer_m"), std::string::npos);
  EXPECT_NE(error_of("risk:\n  specs: [\"var:alpha=2\"]\n").find("risk.specs"), std::string::npos);
  EXPECT_FALSE(error_of("problem: [1, 2]\n").empty());
}

TEST(Config, ValidationErrors) {
  auto cfg = parse_config(kMinimal);
  cfg.seed.reset();
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = parse_config(kMinimal);
  cfg.x_list.push_back(Decision::Constant(1, 9.0));
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = parse_config(kMinimal);
  cfg.problem.name = "knapsack";
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = parse_config(kMinimal);
  cfg.prior.kind = "dirichlet";
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, HashIgnoresWorkersAndOutput) {
  const auto a = parse_config(kMinimal);
  auto b = a;
  b.workers = 8;
  b.output_dir = "elsewhere";
  EXPECT_EQ(a.hash_hex(), b.hash_hex());
  b.seed = 6;
  EXPECT_NE(a.hash_hex(), b.hash_hex());
  EXPECT_EQ(a.hash_hex().size(), 16u);
  EXPECT_EQ(parse_config(kMinimal).canonical(), a.canonical());
}

TEST(Config, BuiltinDefaults) {
  auto cfg = parse_config("problem:\n  name: discrete_portfolio\nexperiment:\n  n_list: [5]\n  seed: 1\n"
                          "risk:\n  specs: [mean]\n");
  const auto pf = build_problem(cfg);
  EXPECT_EQ(pf.decision_box.dim(), 2u);
  EXPECT_TRUE(pf.family.is_discrete());
  EXPECT_EQ(build_prior(cfg, pf.family).kind_name(), "dirichlet");

  cfg.problem.name = "linear_normal";
  const auto ln = build_problem(cfg);
  EXPECT_FALSE(ln.singleton_solution);
  EXPECT_EQ(build_prior(cfg, ln.family).kind_name(), "normal");

  cfg.problem.analytic = false;
  EXPECT_FALSE(static_cast<bool>(build_problem(cfg).H_analytic));
}

TEST(Config, LoadsFile) {
  const auto cfg = load_config(std::string(BRO_TEST_CONFIG_DIR) + "/newsvendor_small.yaml");
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_THROW((void)load_config("/nonexistent/x.yaml"), ConfigError);
}
