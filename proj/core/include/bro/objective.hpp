#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bro/bayes.hpp"
#include "bro/model.hpp"
#include "bro/risk.hpp"
#include "bro/rng.hpp"

namespace bro {

using Decision = Eigen::VectorXd;

/// Compact decision box.
struct Box {
  std::vector<Interval> bounds;

  [[nodiscard]] std::size_t dim() const noexcept { return bounds.size(); }
  [[nodiscard]] bool contains(const Decision& x) const;
  [[nodiscard]] Decision lower() const;
  [[nodiscard]] Decision upper() const;
  [[nodiscard]] Decision center() const;
  [[nodiscard]] Decision clip(Decision x) const;

  static Box interval(double lo, double hi) { return Box{{Interval{lo, hi}}}; }
};

using CostKernel = std::function<double(const Decision& x, double xi)>;
using ExpectedCost = std::function<double(const Decision& x, const ParamPoint& theta)>;
using ExpectedCostGradient = std::function<Vector(const Decision& x, const ParamPoint& theta)>;

/// A decision problem: cost kernel, observation family, decision box and the
/// ground-truth parameter used by experiments. H and its theta-gradient are
/// optional closed forms; without them H is estimated by inner Monte Carlo.
/// Gradients are over the free coordinates (l - 1 for FiniteDiscrete).
struct Problem {
  std::string name;
  ObservationFamily family;
  Box decision_box;
  CostKernel h;
  ExpectedCost H_analytic;
  ExpectedCostGradient grad_H_analytic;
  ParamPoint theta_c;
  /// Whether argmin_x H(x, theta_c) is a single point.
  bool singleton_solution = false;
  /// Closed-form argmin of H(., theta_c), when known.
  std::optional<Decision> known_optimum;

  /// Copy with the closed forms removed (forces the Monte Carlo route).
  [[nodiscard]] Problem without_closed_forms() const;
};

// Builtin problems.

/// h(x, xi) = c x - p min(x, xi) with xi ~ Exponential(rate theta).
Problem newsvendor_exponential(double c, double p, double theta_c, Interval box);

/// h(x, xi) = x xi with xi ~ Normal(theta, sigma2).
Problem linear_normal(double sigma2, double theta_c, Interval box);

/// Scenario-based portfolio with quadratic risk penalty:
/// h(x, i) = -r_i^T x + (gamma / 2) (r_i^T x)^2 where r_i is row i of
/// `payoff` (l scenarios x d assets) and xi = i ~ FiniteDiscrete(theta).
Problem discrete_portfolio(std::vector<double> support, Matrix payoff, double risk_aversion, Vector theta_c,
                           Box box);

/// Throws DomainError unless H is finite on a deterministic sample of box x Theta.
void check_finite(const Problem& problem, std::size_t points = 64);

/// H(x, theta): the closed form when present, else the average of h over
/// inner_m draws from `inner`. Equal streams give common random numbers.
double H_eval(const Problem& problem, const Decision& x, const ParamPoint& theta, std::size_t inner_m,
              Stream inner);

enum class GradientRoute { Auto, FiniteDifference };

struct GradientOptions {
  /// Relative central-difference step; 0 picks 1e-5 (closed-form H) or 1e-3 (Monte Carlo H).
  double rel_step = 0.0;
  std::size_t inner_m = 2000;
  Stream inner{0};
  GradientRoute route = GradientRoute::Auto;
};

/// Gradient of H(x, .) at theta over the free coordinates. Throws
/// SingularityError when theta touches the boundary of its box or simplex.
Vector grad_H_theta(const Problem& problem, const Decision& x, const ParamPoint& theta,
                    const GradientOptions& opts = {});

/// Posterior draw set held fixed across evaluations (sample-path objective).
/// The inner Monte Carlo stream for x depends only on (rng, x).
class BroObjective {
 public:
  BroObjective(const Problem& problem, const PosteriorState& post, std::size_t outer_m, std::size_t inner_m,
               Stream rng);

  /// H(x, theta_j) for every draw j.
  [[nodiscard]] std::vector<double> values(const Decision& x) const;
  [[nodiscard]] double operator()(const RiskSpec& spec, const Decision& x) const;
  /// All specs against one shared H vector.
  [[nodiscard]] std::vector<double> evaluate(std::span<const RiskSpec> specs, const Decision& x) const;

  [[nodiscard]] const std::vector<ParamPoint>& draws() const noexcept { return draws_; }
  [[nodiscard]] const Problem& problem() const noexcept { return problem_; }

 private:
  Problem problem_;
  std::vector<ParamPoint> draws_;
  std::size_t inner_m_;
  Stream inner_base_;
};

/// rho over the posterior of H(x, theta) with outer_m posterior draws.
double bro_objective(const Problem& problem, const RiskSpec& spec, const PosteriorState& post, const Decision& x,
                     std::size_t outer_m, std::size_t inner_m, Stream rng);

}  // namespace bro
