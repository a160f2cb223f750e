#include "bro/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bro/error.hpp"

namespace bro {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPositiveLo = 1e-12;
constexpr double kPositiveHi = 1e12;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double simplex_gap(const Vector& theta) { return std::abs(theta.sum() - 1.0); }

// Category index for a discrete observation, or -1 when xi is not one.
long category(const FiniteDiscrete& d, double xi) {
  if (!std::isfinite(xi) || xi < 0.0 || std::floor(xi) != xi) return -1;
  const auto k = static_cast<long>(xi);
  return k < static_cast<long>(d.support.size()) ? k : -1;
}

}  // namespace

ObservationFamily ObservationFamily::exponential_rate() { return ObservationFamily(ExponentialRate{}); }

ObservationFamily ObservationFamily::normal_known_var(double sigma2) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw DomainError("normal_known_var: sigma2 must be positive");
  }
  return ObservationFamily(NormalKnownVar{sigma2});
}

ObservationFamily ObservationFamily::weibull_known_shape(double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("weibull_known_shape: shape must be positive");
  }
  return ObservationFamily(WeibullKnownShape{shape});
}

ObservationFamily ObservationFamily::finite_discrete(std::vector<double> support) {
  if (support.size() < 2) throw DomainError("finite_discrete: need at least two support points");
  std::sort(support.begin(), support.end());
  if (std::adjacent_find(support.begin(), support.end()) != support.end()) {
    throw DomainError("finite_discrete: support values must be distinct");
  }
  return ObservationFamily(FiniteDiscrete{std::move(support)});
}

std::string_view ObservationFamily::name() const noexcept {
  return std::visit(Overloaded{
                        [](const ExponentialRate&) { return std::string_view("exponential_rate"); },
                        [](const NormalKnownVar&) { return std::string_view("normal_known_var"); },
                        [](const WeibullKnownShape&) { return std::string_view("weibull_known_shape"); },
                        [](const FiniteDiscrete&) { return std::string_view("finite_discrete"); },
                    },
                    kind_);
}

std::size_t ObservationFamily::param_dim() const noexcept {
  if (const auto* d = std::get_if<FiniteDiscrete>(&kind_)) return d->support.size();
  return 1;
}

std::size_t ObservationFamily::info_dim() const noexcept {
  return is_discrete() ? param_dim() - 1 : 1;
}

std::vector<Interval> ObservationFamily::default_bounds() const {
  return std::visit(Overloaded{
                        [](const NormalKnownVar&) {
                          return std::vector<Interval>{{-kPositiveHi, kPositiveHi}};
                        },
                        [](const FiniteDiscrete& d) {
                          return std::vector<Interval>(d.support.size(), Interval{0.0, 1.0});
                        },
                        [](const auto&) { return std::vector<Interval>{{kPositiveLo, kPositiveHi}}; },
                    },
                    kind_);
}

ParamPoint::ParamPoint(Vector theta, std::vector<Interval> bounds)
    : ParamPoint(std::move(theta), std::make_shared<const std::vector<Interval>>(std::move(bounds))) {}

ParamPoint::ParamPoint(Vector theta, std::shared_ptr<const std::vector<Interval>> bounds)
    : theta_(std::move(theta)), bounds_(std::move(bounds)) {
  if (static_cast<std::size_t>(theta_.size()) != bounds_->size()) {
    throw DomainError("ParamPoint: theta has " + std::to_string(theta_.size()) + " coordinates but " +
                      std::to_string(bounds_->size()) + " bounds");
  }
  for (Eigen::Index i = 0; i < theta_.size(); ++i) {
    const auto& b = (*bounds_)[static_cast<std::size_t>(i)];
    if (!(b.lo <= b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw DomainError("ParamPoint: bounds must be finite closed intervals");
    }
    if (!b.contains(theta_[i])) {
      throw DomainError("ParamPoint: coordinate " + std::to_string(i) + " = " +
                        std::to_string(theta_[i]) + " outside [" + std::to_string(b.lo) + ", " +
                        std::to_string(b.hi) + "]");
    }
  }
}

ParamPoint ParamPoint::with_theta(Vector theta) const { return ParamPoint(std::move(theta), bounds_); }

ParamPoint ParamPoint::for_family(const ObservationFamily& family, Vector theta) {
  ParamPoint p(std::move(theta), family.default_bounds());
  validate_parameter(family, p);
  return p;
}

void validate_parameter(const ObservationFamily& family, const ParamPoint& theta) {
  if (theta.size() != family.param_dim()) {
    throw DomainError(std::string(family.name()) + ": parameter has wrong dimension");
  }
  std::visit(Overloaded{
                 [&](const NormalKnownVar&) {
                   if (!std::isfinite(theta[0])) throw DomainError("normal_known_var: mean not finite");
                 },
                 [&](const FiniteDiscrete&) {
                   if ((theta.theta().array() < 0.0).any() || simplex_gap(theta.theta()) > 1e-12) {
                     throw DomainError("finite_discrete: parameter must lie on the probability simplex");
                   }
                 },
                 [&](const auto&) {
                   if (!(theta[0] > 0.0) || !std::isfinite(theta[0])) {
                     throw DomainError(std::string(family.name()) + ": parameter must be positive");
                   }
                 },
             },
             family.kind());
}

double logpdf(const ObservationFamily& family, const ParamPoint& theta, double xi) {
  validate_parameter(family, theta);
  return std::visit(
      Overloaded{
          [&](const ExponentialRate&) {
            if (!(xi >= 0.0)) return -kInf;
            return std::log(theta[0]) - theta[0] * xi;
          },
          [&](const NormalKnownVar& f) {
            if (!std::isfinite(xi)) return -kInf;
            const double d = xi - theta[0];
            return -0.5 * std::log(2.0 * std::numbers::pi * f.sigma2) - 0.5 * d * d / f.sigma2;
          },
          [&](const WeibullKnownShape& f) {
            if (!(xi >= 0.0) || !std::isfinite(xi)) return -kInf;
            const double lambda = theta[0];
            return std::log(f.shape / lambda) + (f.shape - 1.0) * std::log(xi) -
                   std::pow(xi, f.shape) / lambda;
          },
          [&](const FiniteDiscrete& f) {
            const long k = category(f, xi);
            if (k < 0) return -kInf;
            return std::log(theta[k]);
          },
      },
      family.kind());
}

double draw(const ObservationFamily& family, const ParamPoint& theta, Stream& rng) {
  return std::visit(Overloaded{
                        [&](const ExponentialRate&) { return rng.exponential() / theta[0]; },
                        [&](const NormalKnownVar& f) { return theta[0] + std::sqrt(f.sigma2) * rng.normal(); },
                        [&](const WeibullKnownShape& f) {
                          // xi^shape is exponential with mean lambda.
                          return std::pow(theta[0] * rng.exponential(), 1.0 / f.shape);
                        },
                        [&](const FiniteDiscrete& f) {
                          const double u = rng.uniform();
                          double acc = 0.0;
                          const std::size_t l = f.support.size();
                          for (std::size_t k = 0; k + 1 < l; ++k) {
                            acc += theta[static_cast<Eigen::Index>(k)];
                            if (u < acc) return static_cast<double>(k);
                          }
                          return static_cast<double>(l - 1);
                        },
                    },
                    family.kind());
}

std::vector<double> sample(const ObservationFamily& family, const ParamPoint& theta, std::size_t n,
                           Stream& rng) {
  validate_parameter(family, theta);
  std::vector<double> out(n);
  for (auto& v : out) v = draw(family, theta, rng);
  return out;
}

Matrix fisher_information(const ObservationFamily& family, const ParamPoint& theta) {
  validate_parameter(family, theta);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!theta.bounds()[i].interior(theta[static_cast<Eigen::Index>(i)])) {
      throw SingularityError(std::string(family.name()) +
                             ": Fisher information requested on the parameter boundary");
    }
  }
  return std::visit(Overloaded{
                        [&](const NormalKnownVar& f) -> Matrix { return Matrix::Constant(1, 1, 1.0 / f.sigma2); },
                        [&](const FiniteDiscrete&) -> Matrix {
                          // Free coordinates theta_1..theta_{l-1}, theta_l = 1 - sum.
                          const Eigen::Index l = static_cast<Eigen::Index>(theta.size());
                          const double last = theta[l - 1];
                          Matrix info = Matrix::Constant(l - 1, l - 1, 1.0 / last);
                          for (Eigen::Index i = 0; i + 1 < l; ++i) info(i, i) += 1.0 / theta[i];
                          return info;
                        },
                        // Rate theta and lambda = scale^shape both give 1 / theta^2.
                        [&](const auto&) -> Matrix { return Matrix::Constant(1, 1, 1.0 / (theta[0] * theta[0])); },
                    },
                    family.kind());
}

}  // namespace bro
