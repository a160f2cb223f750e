#include "bro/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <vector>

#include "bro/error.hpp"
#include "bro/normal.hpp"

namespace bro {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

AsymptoticParams sigma_x(const Problem& problem, const Decision& x, const ParamPoint& theta_c,
                         const GradientOptions& grad_opts) {
  AsymptoticParams out;
  out.grad = grad_H_theta(problem, x, theta_c, grad_opts);
  out.info = fisher_information(problem.family, theta_c);
  Eigen::LLT<Matrix> llt(out.info);
  if (llt.info() != Eigen::Success) throw SingularityError("sigma_x: Fisher information is not positive definite");
  const double s2 = out.grad.dot(llt.solve(out.grad));
  out.sigma_x = std::sqrt(std::max(s2, 0.0));
  return out;
}

double limit_mean(const RiskSpec& spec, double sigma) {
  return std::visit(Overloaded{
                        [](const MeanRisk&) { return 0.0; },
                        [](const MeanVarianceRisk&) { return 0.0; },
                        [&](const ValueAtRisk& r) {
                          if (r.alpha >= 1.0) throw DomainError("bias term undefined for VaR at alpha = 1");
                          return normal_var(0.0, sigma, r.alpha);
                        },
                        [&](const ConditionalValueAtRisk& r) { return normal_cvar(0.0, sigma, r.alpha); },
                    },
                    spec.kind());
}

double bias_term(const RiskSpec& spec, double sigma, std::size_t n) {
  if (n == 0) throw InputError("bias_term: n must be >= 1");
  return limit_mean(spec, sigma) / std::sqrt(static_cast<double>(n));
}

ConfidenceInterval confidence_interval(const RiskSpec& spec, double estimate, double sigma, std::size_t n,
                                       double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw DomainError("confidence_interval: beta must lie in (0, 1)");
  const double center = estimate - bias_term(spec, sigma, n);
  const double hw = normal::quantile(1.0 - beta / 2.0) * sigma / std::sqrt(static_cast<double>(n));
  return {center - hw, center + hw};
}

NormalityReport normality_diagnostic(std::span<const double> errors, double predicted_mean, double predicted_sd) {
  if (errors.size() < 30) throw InputError("normality_diagnostic: need at least 30 replications");
  if (!(predicted_sd > 0.0) || !std::isfinite(predicted_sd)) {
    throw DomainError("normality_diagnostic: predicted_sd must be positive");
  }
  NormalityReport r;
  r.replications = errors.size();
  r.predicted_mean = predicted_mean;
  r.predicted_sd = predicted_sd;

  const double n = static_cast<double>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  r.sample_mean = sum / n;
  double ss = 0.0;
  for (double e : errors) ss += (e - r.sample_mean) * (e - r.sample_mean);
  r.sample_sd = std::sqrt(ss / (n - 1.0));
  r.degenerate = r.sample_sd == 0.0;

  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = normal::cdf((sorted[i] - predicted_mean) / predicted_sd);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  r.ks_stat = d;
  return r;
}

double ks_threshold_95(std::size_t replications) { return 1.36 / std::sqrt(static_cast<double>(replications)); }

std::string NormalityReport::to_json() const {
  nlohmann::json j{{"sample_mean", sample_mean},       {"sample_sd", sample_sd},   {"predicted_mean", predicted_mean},
                   {"predicted_sd", predicted_sd},     {"ks_stat", ks_stat},       {"replications", replications},
                   {"degenerate", degenerate}};
  return j.dump();
}

std::string NormalityReport::csv_header() {
  return "sample_mean,sample_sd,predicted_mean,predicted_sd,ks_stat,replications,degenerate";
}

std::string NormalityReport::csv_row() const {
  return g9(sample_mean) + "," + g9(sample_sd) + "," + g9(predicted_mean) + "," + g9(predicted_sd) + "," +
         g9(ks_stat) + "," + std::to_string(replications) + "," + (degenerate ? "1" : "0");
}

}  // namespace bro
