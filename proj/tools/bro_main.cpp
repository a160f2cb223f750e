#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "bro/error.hpp"
#include "bro/harness.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> out;
  std::string samples;
  std::vector<std::string> risks;
};

void add_common(CLI::App* sub, Options& opt) {
  sub->add_option("--seed", opt.seed, "Base seed (overrides experiment.seed)");
  sub->add_option("--workers", opt.workers, "Worker threads for replications")->check(CLI::PositiveNumber);
  sub->add_option("--out", opt.out, "Output directory (overrides experiment.output_dir)");
}

int run(bro::Command command, const Options& opt) {
  if (command == bro::Command::RiskEval) {
    std::vector<bro::RiskSpec> specs;
    for (const auto& r : opt.risks) specs.push_back(bro::RiskSpec::parse(r));
    const auto samples = bro::read_samples(opt.samples);
    const auto out = bro::run_risk_eval(specs, samples);
    for (const auto& row : out.rows) std::printf("%s\t%.17g\n", row.spec.c_str(), *row.objective);
    if (opt.out) {
      const auto files = bro::write_outputs(out, bro::ExperimentConfig{}, *opt.out);
      std::fprintf(stderr, "wrote %s\n", files.csv.string().c_str());
    }
    return 0;
  }

  auto cfg = bro::load_config(opt.config);
  if (opt.seed) cfg.seed = opt.seed;
  if (opt.workers) cfg.workers = *opt.workers;
  if (opt.out) cfg.output_dir = *opt.out;
  const auto out = bro::run_experiment(command, cfg);
  const auto files = bro::write_outputs(out, cfg, cfg.output_dir);
  std::fprintf(stderr, "%s: %zu rows in %.2fs, config %s\n", std::string(bro::to_string(command)).c_str(),
               out.rows.size(), out.wall_seconds, out.config_hash.c_str());
  std::printf("%s\n", files.csv.string().c_str());
  if (files.report_json) std::printf("%s\n", files.report_json->string().c_str());
  if (files.trace_csv) std::printf("%s\n", files.trace_csv->string().c_str());
  std::printf("%s\n", files.summary.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian risk optimization experiments"};
  app.require_subcommand(1);
  Options opt;

  const std::pair<bro::Command, const char*> experiments[] = {
      {bro::Command::Consistency, "Objective and solution-set errors across n"},
      {bro::Command::Normality, "Scaled pointwise errors against the normal limit"},
      {bro::Command::Coverage, "Empirical coverage of the asymptotic confidence intervals"},
      {bro::Command::OptimalValue, "Scaled optimal-value errors against the normal limit"},
      {bro::Command::Solve, "Single BRO solve on generated or supplied data"},
  };
  std::optional<bro::Command> chosen;
  for (const auto& [command, help] : experiments) {
    auto* sub = app.add_subcommand(std::string(bro::to_string(command)), help);
    sub->add_option("--config", opt.config, "YAML experiment file")->required()->check(CLI::ExistingFile);
    add_common(sub, opt);
    sub->callback([&chosen, c = command] { chosen = c; });
  }
  auto* risk = app.add_subcommand("risk-eval", "Apply risk functionals to a sample file");
  risk->add_option("--samples", opt.samples, "Whitespace or comma separated numbers")
      ->required()
      ->check(CLI::ExistingFile);
  risk->add_option("--risk", opt.risks, "mean | mean_variance:w=W | var:alpha=A | cvar:alpha=A")->required();
  risk->add_option("--out", opt.out, "Also write CSV and summary.json here");
  risk->callback([&chosen] { chosen = bro::Command::RiskEval; });

  CLI11_PARSE(app, argc, argv);

  try {
    return run(*chosen, opt);
  } catch (const bro::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const bro::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
