#pragma once

namespace bro::normal {

/// Standard normal density.
double pdf(double z) noexcept;

/// Standard normal CDF.
double cdf(double z) noexcept;

/// Inverse standard normal CDF; throws DomainError unless p is in (0, 1).
double quantile(double p);

}  // namespace bro::normal
