#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bro/asymptotics.hpp"
#include "bro/config.hpp"

namespace bro {

enum class Command { Consistency, Normality, Coverage, OptimalValue, Solve, RiskEval };

std::string_view to_string(Command c) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

/// One CSV row. The column set is shared by every subcommand; cells that do
/// not apply stay empty.
struct RunRecord {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string row_kind = "rep";  ///< "rep" or "summary"
  std::size_t n = 0;
  std::optional<std::size_t> rep;
  std::string spec;
  std::optional<Decision> x;
  std::optional<double> objective;
  std::optional<double> true_value;
  std::optional<double> scaled_error;
  std::optional<double> ci_lo;
  std::optional<double> ci_hi;
  std::optional<double> covered;  ///< 0/1 per replication, a fraction in summary rows
  std::optional<Decision> x_star;
  std::optional<double> min_value;
  std::optional<double> true_min;
  std::optional<double> deviation;

  static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

/// Normality report with the cell it belongs to.
struct LabeledReport {
  std::string spec;
  std::optional<Decision> x;
  std::size_t n = 0;
  double sigma_x = 0.0;
  NormalityReport report;
};

struct ExperimentOutput {
  Command command = Command::Consistency;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::vector<RunRecord> rows;
  std::vector<LabeledReport> reports;
  std::vector<SolveResult> solves;  ///< solve subcommand, one per spec
  double wall_seconds = 0.0;
};

/// Runs a subcommand. Replications run on cfg.workers threads; results do
/// not depend on the worker count. Throws ConfigError on invalid settings.
ExperimentOutput run_experiment(Command command, const ExperimentConfig& cfg);

struct OutputFiles {
  std::filesystem::path csv;
  std::optional<std::filesystem::path> report_json;
  std::optional<std::filesystem::path> trace_csv;
  std::filesystem::path summary;
};

/// Writes <dir>/<command>_<hash>.csv, the report JSON when there are
/// reports or solves, and <dir>/summary.json.
OutputFiles write_outputs(const ExperimentOutput& out, const ExperimentConfig& cfg, const std::filesystem::path& dir);

/// Medians per (spec, n) used by the consistency summary.
struct ConsistencySummary {
  std::string spec;
  std::size_t n = 0;
  double median_abs_error = 0.0;
  double median_deviation = 0.0;
  double median_abs_min_error = 0.0;
};
std::vector<ConsistencySummary> summarize_consistency(const ExperimentOutput& out);

/// Empirical coverage per (spec, n, x) from the summary rows.
struct CoverageSummary {
  std::string spec;
  std::size_t n = 0;
  std::optional<Decision> x;
  double coverage = 0.0;
};
std::vector<CoverageSummary> summarize_coverage(const ExperimentOutput& out);

/// Reads whitespace- or comma-separated numbers; '#' starts a comment.
std::vector<double> read_samples(const std::filesystem::path& path);

/// Applies each spec to the samples; rows carry a hash of samples and specs.
ExperimentOutput run_risk_eval(std::span<const RiskSpec> specs, std::span<const double> samples);

/// Calls fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any task is rethrown.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace bro
