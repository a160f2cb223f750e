#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bro/bayes.hpp"
#include "bro/objective.hpp"
#include "bro/optimize.hpp"
#include "bro/risk.hpp"

namespace bro {

struct FamilyConfig {
  std::string kind;
  double sigma2 = 1.0;
  double shape = 1.0;
  std::vector<double> support;
};

struct ProblemConfig {
  std::string name = "newsvendor_exp";
  double c = 1.0;
  double p = 3.0;
  std::vector<double> theta_c;
  std::vector<double> x_min;  ///< one entry broadcasts over all coordinates
  std::vector<double> x_max;
  std::optional<FamilyConfig> family;
  std::vector<std::vector<double>> payoff;
  double risk_aversion = 1.0;
  bool analytic = true;  ///< false drops the closed-form H and gradient
};

struct PriorConfig {
  std::string kind;  ///< empty: default prior for the family
  double alpha0 = 1.0;
  double beta0 = 1.0;
  double mu0 = 0.0;
  double sigma0_2 = 100.0;
  std::vector<double> alpha;
};

/// Everything one experiment run needs. Sections in the YAML file map to
/// `problem`, `prior`, `risk`, `experiment` and `optimizer`.
struct ExperimentConfig {
  ProblemConfig problem;
  PriorConfig prior;
  std::vector<RiskSpec> specs;
  std::vector<std::size_t> n_list;
  std::size_t replications = 1;
  std::size_t outer_m = 2000;
  std::size_t inner_m = 2000;
  std::vector<Decision> x_list;
  std::optional<std::uint64_t> seed;
  double beta = 0.05;
  std::size_t workers = 1;
  std::string output_dir = "out";
  std::string data_file;
  OptimizerConfig optimizer;

  /// Canonical JSON of every field that influences results (workers and
  /// output_dir excluded).
  [[nodiscard]] std::string canonical() const;
  /// 16 hex digits of FNV-1a over canonical().
  [[nodiscard]] std::string hash_hex() const;
  /// Throws ConfigError when required fields are missing or inconsistent.
  void validate() const;
};

/// Parses YAML text. Unknown sections or keys are errors; messages name the
/// section, the key and the line.
ExperimentConfig parse_config(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

Problem build_problem(const ExperimentConfig& cfg);
PriorSpec build_prior(const ExperimentConfig& cfg, const ObservationFamily& family);

}  // namespace bro
