#pragma once

// Randomized property checks for the empirical risk functionals, shared by
// the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bro/rng.hpp"
#include "bro/risk.hpp"

namespace bro::test_support {

struct PropertyTally {
  std::size_t instances = 0;
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::string first_failure;
};

inline std::vector<double> random_vector(Stream& s, std::size_t n) {
  std::vector<double> v(n);
  const bool atoms = s.uniform() < 0.3;  // ties exercise the boundary weights
  const double scale = std::exp(4.0 * s.uniform() - 2.0);
  for (auto& x : v) {
    x = scale * s.normal();
    if (atoms) x = std::round(x);
  }
  return v;
}

inline double random_alpha(Stream& s, std::size_t n) {
  // Half the time land exactly on a grid point k/n.
  if (s.uniform() < 0.5) {
    const auto k = 1 + s.next_u64() % std::max<std::size_t>(1, n - 1);
    const double a = static_cast<double>(k) / static_cast<double>(n);
    if (a < 1.0) return a;
  }
  return 0.01 + 0.98 * s.uniform();
}

inline PropertyTally check_risk_properties(std::size_t instances, std::uint64_t seed) {
  PropertyTally t;
  Stream s(seed);
  const auto record = [&t](bool ok, const std::string& what) {
    ++t.checks;
    if (!ok) {
      ++t.violations;
      if (t.first_failure.empty()) t.first_failure = what;
    }
  };
  for (std::size_t i = 0; i < instances; ++i, ++t.instances) {
    const std::size_t n = 1 + s.next_u64() % 60;
    const auto x = random_vector(s, n);
    auto y = random_vector(s, n);
    const double alpha = random_alpha(s, n);
    const double a = std::exp(3.0 * s.uniform() - 1.5);
    const double b = 10.0 * s.normal();

    std::vector<double> ax(n), above(n), sum(n), absdiff(n);
    double sup = 0.0, mag = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      ax[k] = a * x[k] + b;
      above[k] = x[k] + std::abs(y[k]);
      sum[k] = x[k] + y[k];
      absdiff[k] = std::abs(x[k] - y[k]);
      sup = std::max(sup, absdiff[k]);
      mag = std::max({mag, std::abs(x[k]), std::abs(y[k]), std::abs(ax[k])});
    }
    const double slack = 1e-12 * mag;
    const std::string tag = " (instance " + std::to_string(i) + ", n=" + std::to_string(n) + ")";

    for (const auto& spec : {RiskSpec::mean(), RiskSpec::value_at_risk(alpha), RiskSpec::cvar(alpha)}) {
      const std::string name = spec.to_string();
      const double rx = apply_risk(spec, x), ry = apply_risk(spec, y);
      record(std::abs(apply_risk(spec, ax) - (a * rx + b)) <= slack, name + " translation/homogeneity" + tag);
      record(apply_risk(spec, x) <= apply_risk(spec, above) + slack, name + " monotonicity" + tag);
      if (!std::holds_alternative<MeanRisk>(spec.kind())) {
        record(std::abs(rx - ry) <= sup + slack, name + " sup-norm Lipschitz" + tag);
      }
      if (!std::holds_alternative<ValueAtRisk>(spec.kind())) {
        record(std::abs(rx - ry) <= apply_risk(spec, absdiff) + slack, name + " risk-of-difference bound" + tag);
        record(apply_risk(spec, sum) <= rx + ry + slack, name + " subadditivity" + tag);
      }
    }
    record(cvar_alpha(x, alpha) >= var_alpha(x, alpha) - slack, "cvar >= var" + tag);
    record(cvar_alpha(x, alpha) >= sample_mean(x) - slack, "cvar >= mean" + tag);
  }
  return t;
}

}  // namespace bro::test_support
