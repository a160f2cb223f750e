#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bro/exact_sum.hpp"
#include "bro/model.hpp"
#include "bro/rng.hpp"

namespace bro {

// Conjugate hyperparameters. Gamma uses (shape, rate); InvGamma uses
// (shape, scale) and lives on lambda = scale^shape of the Weibull family.
struct GammaHyper {
  double shape = 1.0;
  double rate = 1.0;
  friend bool operator==(const GammaHyper&, const GammaHyper&) = default;
};
struct NormalHyper {
  double mean = 0.0;
  double var = 1.0;
  friend bool operator==(const NormalHyper&, const NormalHyper&) = default;
};
struct InvGammaHyper {
  double shape = 1.0;
  double scale = 1.0;
  friend bool operator==(const InvGammaHyper&, const InvGammaHyper&) = default;
};
struct DirichletHyper {
  std::vector<double> alpha;
  friend bool operator==(const DirichletHyper&, const DirichletHyper&) = default;
};

using Hyperparameters = std::variant<GammaHyper, NormalHyper, InvGammaHyper, DirichletHyper>;

/// A conjugate prior paired with its observation family.
class PriorSpec {
 public:
  /// Throws DomainError on non-positive hyperparameters or an illegal pairing
  /// (Gamma/exponential, Normal/normal, InvGamma/Weibull, Dirichlet/discrete).
  PriorSpec(Hyperparameters hyper, ObservationFamily family);

  static PriorSpec gamma(double shape, double rate) {
    return {GammaHyper{shape, rate}, ObservationFamily::exponential_rate()};
  }
  static PriorSpec normal(double mean, double var, double sigma2) {
    return {NormalHyper{mean, var}, ObservationFamily::normal_known_var(sigma2)};
  }
  static PriorSpec inv_gamma(double shape, double scale, double weibull_shape) {
    return {InvGammaHyper{shape, scale}, ObservationFamily::weibull_known_shape(weibull_shape)};
  }
  static PriorSpec dirichlet(std::vector<double> alpha, std::vector<double> support) {
    return {DirichletHyper{std::move(alpha)}, ObservationFamily::finite_discrete(std::move(support))};
  }

  [[nodiscard]] const Hyperparameters& hyper() const noexcept { return hyper_; }
  [[nodiscard]] const ObservationFamily& family() const noexcept { return family_; }
  [[nodiscard]] std::string_view kind_name() const noexcept;

 private:
  Hyperparameters hyper_;
  ObservationFamily family_;
};

/// The posterior after absorbing n observations. Immutable; absorb() returns
/// a new state. Sufficient statistics are held exactly so that the
/// hyperparameters do not depend on the order or batching of the data.
class PosteriorState {
 public:
  explicit PosteriorState(PriorSpec prior);

  [[nodiscard]] PosteriorState absorb(std::span<const double> data) const;

  [[nodiscard]] const PriorSpec& prior() const noexcept { return prior_; }
  [[nodiscard]] const ObservationFamily& family() const noexcept { return prior_.family(); }
  [[nodiscard]] const Hyperparameters& hyper() const noexcept { return hyper_; }
  [[nodiscard]] std::size_t n() const noexcept { return n_; }

  /// Sum of xi (exponential, normal) or xi^shape (Weibull).
  [[nodiscard]] double statistic_sum() const { return sum_.value(); }
  /// Category counts (discrete family only; empty otherwise).
  [[nodiscard]] const std::vector<std::size_t>& counts() const noexcept { return counts_; }

  [[nodiscard]] std::string to_json() const;
  static PosteriorState from_json(std::string_view text);

 private:
  void refresh();

  PriorSpec prior_;
  Hyperparameters hyper_;
  std::size_t n_ = 0;
  ExactSum sum_;
  std::vector<std::size_t> counts_;
};

PosteriorState posterior_update(const PriorSpec& prior, std::span<const double> data);

/// m i.i.d. parameter draws. For the Weibull family the draws are of lambda.
std::vector<ParamPoint> posterior_sample(const PosteriorState& post, std::size_t m, Stream& rng);

struct PosteriorMoments {
  Vector mean;
  Matrix cov;
};

/// Closed-form posterior mean and covariance (full l x l for Dirichlet).
/// Throws MomentUndefinedError for InvGamma with shape <= 2.
PosteriorMoments posterior_moments(const PosteriorState& post);

/// Split of E[ ||sqrt(n)(theta - theta_c)||^2 ] under the posterior.
struct SecondMomentTerms {
  double mean_term = 0.0;      ///< ||sqrt(n)(E theta - theta_c)||^2
  double variance_term = 0.0;  ///< n * trace(Cov theta)
  [[nodiscard]] double total() const noexcept { return mean_term + variance_term; }
};

SecondMomentTerms a41_terms(const PosteriorState& post, const ParamPoint& theta_c);

/// Posterior second moment of sqrt(n)(theta - theta_c); requires n >= 1.
double a41_diagnostic(const PosteriorState& post, const ParamPoint& theta_c);

}  // namespace bro
