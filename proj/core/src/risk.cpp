#include "bro/risk.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bro/error.hpp"
#include "bro/normal.hpp"

namespace bro {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_samples(std::span<const double> s, const char* what) {
  if (s.empty()) throw InputError(std::string(what) + ": samples must be nonempty");
  for (double v : s) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": samples must be finite");
  }
}

// Index (0-based) of the ceil(alpha N)-th order statistic. The small slack
// keeps alpha * N that is an integer up to rounding from stepping past it.
std::size_t quantile_index(std::size_t n, double alpha) {
  const double pos = alpha * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(pos - 1e-9 * std::max(1.0, pos)));
  return std::clamp<std::size_t>(k, 1, n) - 1;
}

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_double(std::string_view s, std::string_view whole) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InputError("risk spec '" + std::string(whole) + "': bad number '" + std::string(s) + "'");
  }
  return v;
}

void check_normal_args(double sigma, double alpha) {
  if (!(sigma >= 0.0)) throw DomainError("normal risk: sigma must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("normal risk: alpha must lie in (0, 1)");
}

}  // namespace

RiskSpec RiskSpec::mean_variance(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("mean_variance: w must be >= 0");
  return RiskSpec(MeanVarianceRisk{w});
}

RiskSpec RiskSpec::value_at_risk(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("var: alpha must lie in (0, 1]");
  return RiskSpec(ValueAtRisk{alpha});
}

RiskSpec RiskSpec::cvar(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("cvar: alpha must lie in (0, 1)");
  return RiskSpec(ConditionalValueAtRisk{alpha});
}

RiskSpec RiskSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const auto head = text.substr(0, colon);
  if (colon == std::string_view::npos) {
    if (head == "mean") return mean();
    throw InputError("risk spec '" + std::string(text) + "': expected mean, mean_variance:w=, var:alpha= or cvar:alpha=");
  }
  const auto arg = text.substr(colon + 1);
  const auto eq = arg.find('=');
  if (eq == std::string_view::npos) throw InputError("risk spec '" + std::string(text) + "': missing '='");
  const auto key = arg.substr(0, eq);
  const double value = parse_double(arg.substr(eq + 1), text);
  if (head == "mean_variance" && key == "w") return mean_variance(value);
  if (head == "var" && key == "alpha") return value_at_risk(value);
  if (head == "cvar" && key == "alpha") return cvar(value);
  throw InputError("risk spec '" + std::string(text) + "': unknown functional or parameter");
}

std::string RiskSpec::to_string() const {
  return std::visit(Overloaded{
                        [](const MeanRisk&) { return std::string("mean"); },
                        [](const MeanVarianceRisk& r) { return "mean_variance:w=" + format_double(r.w); },
                        [](const ValueAtRisk& r) { return "var:alpha=" + format_double(r.alpha); },
                        [](const ConditionalValueAtRisk& r) { return "cvar:alpha=" + format_double(r.alpha); },
                    },
                    kind_);
}

double sample_mean(std::span<const double> samples) {
  require_samples(samples, "mean");
  double s = 0.0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

double var_alpha(std::span<const double> samples, double alpha) {
  require_samples(samples, "var_alpha");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("var_alpha: alpha must lie in (0, 1]");
  if (alpha == 1.0) return *std::max_element(samples.begin(), samples.end());
  std::vector<double> v(samples.begin(), samples.end());
  const auto k = quantile_index(v.size(), alpha);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
  return v[k];
}

double cvar_alpha(std::span<const double> samples, double alpha) {
  require_samples(samples, "cvar_alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("cvar_alpha: alpha must lie in (0, 1)");
  const std::size_t n = samples.size();
  const double nd = static_cast<double>(n);
  std::vector<double> v(samples.begin(), samples.end());

  // Order statistic x_(k) (1-based) covers quantile levels ((k-1)/N, k/N].
  const std::size_t k0 = quantile_index(n, alpha);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k0), v.end());

  const double boundary_weight = static_cast<double>(k0 + 1) / nd - alpha;
  double acc = std::max(boundary_weight, 0.0) * v[k0];
  double tail = 0.0;
  for (std::size_t k = k0 + 1; k < n; ++k) tail += v[k];
  acc += tail / nd;
  return acc / (1.0 - alpha);
}

double mean_variance(std::span<const double> samples, double w) {
  require_samples(samples, "mean_variance");
  if (!(w >= 0.0)) throw DomainError("mean_variance: w must be >= 0");
  const double m = sample_mean(samples);
  if (w == 0.0) return m;
  double ss = 0.0;
  for (double v : samples) ss += (v - m) * (v - m);
  return m + w * ss / static_cast<double>(samples.size());
}

double normal_var(double mu, double sigma, double alpha) {
  check_normal_args(sigma, alpha);
  return mu + sigma * normal::quantile(alpha);
}

double normal_cvar(double mu, double sigma, double alpha) {
  check_normal_args(sigma, alpha);
  return mu + sigma * normal::pdf(normal::quantile(alpha)) / (1.0 - alpha);
}

double apply_risk(const RiskSpec& spec, std::span<const double> samples) {
  return std::visit(Overloaded{
                        [&](const MeanRisk&) { return sample_mean(samples); },
                        [&](const MeanVarianceRisk& r) { return mean_variance(samples, r.w); },
                        [&](const ValueAtRisk& r) { return var_alpha(samples, r.alpha); },
                        [&](const ConditionalValueAtRisk& r) { return cvar_alpha(samples, r.alpha); },
                    },
                    spec.kind());
}

}  // namespace bro
