#include "bro/rng.hpp"

#include <cmath>
#include <numbers>

namespace bro {

Stream Stream::split(std::uint64_t tag) const noexcept {
  // Two rounds so that nearby tags and nearby keys land far apart.
  const std::uint64_t k = mix(key_ ^ mix(tag + kGolden));
  return Stream(FromKey{}, mix(k + 0x2545f4914f6cdd1dULL));
}

Stream Stream::split(std::string_view tag) const noexcept { return split(fnv1a64(tag)); }

Stream Stream::split(std::initializer_list<std::uint64_t> tags) const noexcept {
  Stream s = *this;
  for (auto t : tags) s = s.split(t);
  return s;
}

double Stream::normal() noexcept {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Stream::exponential() noexcept { return -std::log(uniform()); }

double Stream::gamma(double shape) noexcept {
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double z;
    double v;
    do {
      z = normal();
      v = 1.0 + c * z;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
    if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bro
