#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace bro {

struct MeanRisk {
  friend bool operator==(const MeanRisk&, const MeanRisk&) = default;
};
struct MeanVarianceRisk {
  double w = 0.0;
  friend bool operator==(const MeanVarianceRisk&, const MeanVarianceRisk&) = default;
};
struct ValueAtRisk {
  double alpha = 0.95;
  friend bool operator==(const ValueAtRisk&, const ValueAtRisk&) = default;
};
struct ConditionalValueAtRisk {
  double alpha = 0.95;
  friend bool operator==(const ConditionalValueAtRisk&, const ConditionalValueAtRisk&) = default;
};

/// Which law-invariant functional to apply to the posterior-induced H(x, theta).
class RiskSpec {
 public:
  using Kind = std::variant<MeanRisk, MeanVarianceRisk, ValueAtRisk, ConditionalValueAtRisk>;

  static RiskSpec mean() { return RiskSpec(MeanRisk{}); }
  static RiskSpec mean_variance(double w);
  /// alpha in (0, 1]; alpha = 1 is the worst case over the draws.
  static RiskSpec value_at_risk(double alpha);
  /// alpha in (0, 1).
  static RiskSpec cvar(double alpha);

  /// Parses `mean`, `mean_variance:w=0.5`, `var:alpha=0.95`, `cvar:alpha=0.95`.
  static RiskSpec parse(std::string_view text);
  /// Inverse of parse(); round-trips exactly.
  [[nodiscard]] std::string to_string() const;

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  friend bool operator==(const RiskSpec&, const RiskSpec&) = default;

 private:
  explicit RiskSpec(Kind k) : kind_(k) {}
  Kind kind_;
};

double sample_mean(std::span<const double> samples);

/// Left-continuous empirical quantile inf{t : F_N(t) >= alpha}: the
/// ceil(alpha N)-th order statistic. alpha in (0, 1].
double var_alpha(std::span<const double> samples, double alpha);

/// (1 / (1 - alpha)) * integral over (alpha, 1] of the empirical quantile
/// function. The boundary order statistic gets fractional weight.
double cvar_alpha(std::span<const double> samples, double alpha);

/// Mean plus w times the variance with divisor N.
double mean_variance(std::span<const double> samples, double w);

/// mu + sigma * inverse_normal_cdf(alpha).
double normal_var(double mu, double sigma, double alpha);

/// mu + sigma * normal_pdf(inverse_normal_cdf(alpha)) / (1 - alpha).
double normal_cvar(double mu, double sigma, double alpha);

double apply_risk(const RiskSpec& spec, std::span<const double> samples);

}  // namespace bro
