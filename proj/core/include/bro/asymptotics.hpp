#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "bro/model.hpp"
#include "bro/objective.hpp"
#include "bro/risk.hpp"

namespace bro {

/// Delta-method ingredients at a fixed decision.
struct AsymptoticParams {
  double sigma_x = 0.0;  ///< sqrt(grad^T info^{-1} grad)
  Vector grad;           ///< gradient of H(x, .) at theta_c
  Matrix info;           ///< Fisher information at theta_c
  std::size_t n = 0;
};

AsymptoticParams sigma_x(const Problem& problem, const Decision& x, const ParamPoint& theta_c,
                         const GradientOptions& grad_opts = {});

/// Mean of the normal limit of sqrt(n) (rho - H(x, theta_c)) for a spec:
/// 0 for mean and mean-variance, sigma_x Phi^{-1}(alpha) for VaR and
/// sigma_x phi(Phi^{-1}(alpha)) / (1 - alpha) for CVaR.
double limit_mean(const RiskSpec& spec, double sigma_x);

/// Deterministic offset of a spec's objective from the posterior mean
/// objective at sample size n, i.e. limit_mean / sqrt(n).
double bias_term(const RiskSpec& spec, double sigma_x, std::size_t n);

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;
  [[nodiscard]] double center() const noexcept { return 0.5 * (lo + hi); }
  [[nodiscard]] double half_width() const noexcept { return 0.5 * (hi - lo); }
  [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
};

/// (estimate - bias_term) +/- z_{1 - beta/2} sigma_x / sqrt(n).
ConfidenceInterval confidence_interval(const RiskSpec& spec, double estimate, double sigma_x, std::size_t n,
                                       double beta);

struct NormalityReport {
  double sample_mean = 0.0;
  double sample_sd = 0.0;
  double predicted_mean = 0.0;
  double predicted_sd = 0.0;
  double ks_stat = 0.0;
  std::size_t replications = 0;
  bool degenerate = false;  ///< the errors have zero spread

  [[nodiscard]] std::string to_json() const;
  [[nodiscard]] static std::string csv_header();
  [[nodiscard]] std::string csv_row() const;
};

/// Moments of the scaled errors and the one-sample Kolmogorov-Smirnov
/// distance to N(predicted_mean, predicted_sd^2). Needs at least 30 errors.
NormalityReport normality_diagnostic(std::span<const double> errors, double predicted_mean, double predicted_sd);

/// Kolmogorov-Smirnov 95% acceptance threshold 1.36 / sqrt(R).
double ks_threshold_95(std::size_t replications);

}  // namespace bro
