#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "bro/rng.hpp"

namespace bro {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double v) const noexcept { return v >= lo && v <= hi; }
  [[nodiscard]] bool interior(double v) const noexcept { return v > lo && v < hi; }
  [[nodiscard]] double width() const noexcept { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Observation families. ExponentialRate is parameterized by the rate; the
// Weibull family's coordinate is lambda = scale^shape, the quantity that
// carries the inverse-gamma conjugate posterior. FiniteDiscrete observations
// are category indices 0..l-1 into `support`.
struct ExponentialRate {
  friend bool operator==(const ExponentialRate&, const ExponentialRate&) = default;
};
struct NormalKnownVar {
  double sigma2 = 1.0;
  friend bool operator==(const NormalKnownVar&, const NormalKnownVar&) = default;
};
struct WeibullKnownShape {
  double shape = 1.0;
  friend bool operator==(const WeibullKnownShape&, const WeibullKnownShape&) = default;
};
struct FiniteDiscrete {
  std::vector<double> support;
  friend bool operator==(const FiniteDiscrete&, const FiniteDiscrete&) = default;
};

class ObservationFamily {
 public:
  using Kind = std::variant<ExponentialRate, NormalKnownVar, WeibullKnownShape, FiniteDiscrete>;

  static ObservationFamily exponential_rate();
  static ObservationFamily normal_known_var(double sigma2);
  static ObservationFamily weibull_known_shape(double shape);
  /// Support values must be distinct; they are stored sorted.
  static ObservationFamily finite_discrete(std::vector<double> support);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string_view name() const noexcept;

  /// Length l of the parameter vector.
  [[nodiscard]] std::size_t param_dim() const noexcept;
  /// Dimension of the Fisher information (l - 1 for FiniteDiscrete).
  [[nodiscard]] std::size_t info_dim() const noexcept;
  [[nodiscard]] bool is_discrete() const noexcept {
    return std::holds_alternative<FiniteDiscrete>(kind_);
  }

  /// Compact parameter box used when a ParamPoint is built for this family.
  [[nodiscard]] std::vector<Interval> default_bounds() const;

  friend bool operator==(const ObservationFamily&, const ObservationFamily&) = default;

 private:
  explicit ObservationFamily(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// A parameter value together with the compact box it must live in.
class ParamPoint {
 public:
  /// Throws DomainError when theta leaves the bounds or the sizes differ.
  ParamPoint(Vector theta, std::vector<Interval> bounds);

  /// Uses the family's default bounds and checks family constraints
  /// (positivity, probability simplex).
  static ParamPoint for_family(const ObservationFamily& family, Vector theta);
  static ParamPoint for_family(const ObservationFamily& family, double theta) {
    return for_family(family, Vector::Constant(1, theta));
  }

  [[nodiscard]] const Vector& theta() const noexcept { return theta_; }
  [[nodiscard]] double operator[](Eigen::Index i) const { return theta_[i]; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(theta_.size()); }
  [[nodiscard]] const std::vector<Interval>& bounds() const noexcept { return *bounds_; }

  /// Same bounds, different coordinates.
  [[nodiscard]] ParamPoint with_theta(Vector theta) const;

 private:
  ParamPoint(Vector theta, std::shared_ptr<const std::vector<Interval>> bounds);
  Vector theta_;
  std::shared_ptr<const std::vector<Interval>> bounds_;
};

/// Throws DomainError unless theta is a valid parameter of `family`.
void validate_parameter(const ObservationFamily& family, const ParamPoint& theta);

/// Log density (or log mass) of P_theta at xi; -infinity outside the support.
double logpdf(const ObservationFamily& family, const ParamPoint& theta, double xi);

/// One draw from P_theta. Consumes a fixed number of stream words that does
/// not depend on theta, so equal streams give common random numbers.
double draw(const ObservationFamily& family, const ParamPoint& theta, Stream& rng);

/// n i.i.d. draws from P_theta.
std::vector<double> sample(const ObservationFamily& family, const ParamPoint& theta,
                           std::size_t n, Stream& rng);

/// Closed-form Fisher information per observation. For FiniteDiscrete the
/// matrix is over the first l-1 coordinates. Throws SingularityError when
/// theta is on the boundary of its box or of the simplex.
Matrix fisher_information(const ObservationFamily& family, const ParamPoint& theta);

}  // namespace bro
