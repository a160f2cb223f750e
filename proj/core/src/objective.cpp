#include "bro/objective.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include "bro/error.hpp"

namespace bro {
namespace {

std::uint64_t hash_decision(const Decision& x) {
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(x.data()),
                                  static_cast<std::size_t>(x.size()) * sizeof(double)));
}

void require_in_box(const Problem& problem, const Decision& x) {
  if (!problem.decision_box.contains(x)) {
    throw DomainError(problem.name + ": decision outside the box");
  }
}

}  // namespace

bool Box::contains(const Decision& x) const {
  if (static_cast<std::size_t>(x.size()) != bounds.size()) return false;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!bounds[i].contains(x[static_cast<Eigen::Index>(i)])) return false;
  }
  return true;
}

Decision Box::lower() const {
  Decision v(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) v[static_cast<Eigen::Index>(i)] = bounds[i].lo;
  return v;
}

Decision Box::upper() const {
  Decision v(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < dim(); ++i) v[static_cast<Eigen::Index>(i)] = bounds[i].hi;
  return v;
}

Decision Box::center() const { return 0.5 * (lower() + upper()); }

Decision Box::clip(Decision x) const {
  for (std::size_t i = 0; i < dim(); ++i) {
    auto& v = x[static_cast<Eigen::Index>(i)];
    v = std::clamp(v, bounds[i].lo, bounds[i].hi);
  }
  return x;
}

Problem Problem::without_closed_forms() const {
  Problem p = *this;
  p.H_analytic = nullptr;
  p.grad_H_analytic = nullptr;
  return p;
}

Problem newsvendor_exponential(double c, double p, double theta_c, Interval box) {
  if (!(c > 0.0) || !(p > 0.0)) throw DomainError("newsvendor_exp: c and p must be positive");
  if (!(box.lo >= 0.0) || !(box.hi > box.lo)) throw DomainError("newsvendor_exp: need 0 <= x_min < x_max");
  const auto family = ObservationFamily::exponential_rate();
  Problem pr{
      .name = "newsvendor_exp",
      .family = family,
      .decision_box = Box{{box}},
      .h = [c, p](const Decision& x, double xi) { return c * x[0] - p * std::min(x[0], xi); },
      // E min(x, xi) = (1 - e^{-theta x}) / theta
      .H_analytic =
          [c, p](const Decision& x, const ParamPoint& t) {
            return c * x[0] + p * std::expm1(-t[0] * x[0]) / t[0];
          },
      .grad_H_analytic =
          [p](const Decision& x, const ParamPoint& t) {
            const double th = t[0];
            const double e = std::exp(-th * x[0]);
            return Vector::Constant(1, -p * std::expm1(-th * x[0]) / (th * th) - p * x[0] * e / th);
          },
      .theta_c = ParamPoint::for_family(family, theta_c),
      .singleton_solution = true,
      .known_optimum = Decision::Constant(1, p > c ? std::clamp(std::log(p / c) / theta_c, box.lo, box.hi) : box.lo),
  };
  return pr;
}

Problem linear_normal(double sigma2, double theta_c, Interval box) {
  if (!(box.hi > box.lo)) throw DomainError("linear_normal: need x_min < x_max");
  const auto family = ObservationFamily::normal_known_var(sigma2);
  Problem pr{
      .name = "linear_normal",
      .family = family,
      .decision_box = Box{{box}},
      .h = [](const Decision& x, double xi) { return x[0] * xi; },
      .H_analytic = [](const Decision& x, const ParamPoint& t) { return x[0] * t[0]; },
      .grad_H_analytic = [](const Decision& x, const ParamPoint&) { return Vector::Constant(1, x[0]); },
      .theta_c = ParamPoint::for_family(family, theta_c),
      .singleton_solution = theta_c != 0.0,
      .known_optimum = std::nullopt,
  };
  if (theta_c != 0.0) pr.known_optimum = Decision::Constant(1, theta_c > 0.0 ? box.lo : box.hi);
  return pr;
}

Problem discrete_portfolio(std::vector<double> support, Matrix payoff, double risk_aversion, Vector theta_c,
                           Box box) {
  const auto family = ObservationFamily::finite_discrete(std::move(support));
  const auto l = static_cast<Eigen::Index>(family.param_dim());
  if (payoff.rows() != l) throw DomainError("discrete_portfolio: payoff needs one row per support point");
  if (static_cast<std::size_t>(payoff.cols()) != box.dim()) {
    throw DomainError("discrete_portfolio: payoff columns must match the decision dimension");
  }
  if (!(risk_aversion >= 0.0)) throw DomainError("discrete_portfolio: risk_aversion must be >= 0");

  auto cost = [payoff, risk_aversion](const Decision& x, Eigen::Index i) {
    const double r = payoff.row(i).dot(x);
    return -r + 0.5 * risk_aversion * r * r;
  };
  auto theta = ParamPoint::for_family(family, std::move(theta_c));

  // Hessian of H(., theta_c) is gamma * sum_i theta_i r_i r_i^T.
  Matrix hess = Matrix::Zero(payoff.cols(), payoff.cols());
  for (Eigen::Index i = 0; i < l; ++i) hess += theta[i] * payoff.row(i).transpose() * payoff.row(i);
  const bool strictly_convex =
      risk_aversion > 0.0 && Eigen::SelfAdjointEigenSolver<Matrix>(hess).eigenvalues().minCoeff() > 1e-12;

  Problem pr{
      .name = "discrete_portfolio",
      .family = family,
      .decision_box = std::move(box),
      .h = [cost](const Decision& x, double xi) { return cost(x, static_cast<Eigen::Index>(xi)); },
      .H_analytic =
          [cost, l](const Decision& x, const ParamPoint& t) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < l; ++i) acc += t[i] * cost(x, i);
            return acc;
          },
      .grad_H_analytic =
          [cost, l](const Decision& x, const ParamPoint&) {
            Vector g(l - 1);
            const double last = cost(x, l - 1);
            for (Eigen::Index i = 0; i + 1 < l; ++i) g[i] = cost(x, i) - last;
            return g;
          },
      .theta_c = std::move(theta),
      .singleton_solution = strictly_convex,
      .known_optimum = std::nullopt,
  };
  return pr;
}

void check_finite(const Problem& problem, std::size_t points) {
  Stream rng(fnv1a64(problem.name));
  const auto& box = problem.decision_box;
  const auto& tb = problem.theta_c.bounds();
  for (std::size_t k = 0; k < points; ++k) {
    Decision x(static_cast<Eigen::Index>(box.dim()));
    for (std::size_t i = 0; i < box.dim(); ++i) {
      const auto& b = box.bounds[i];
      x[static_cast<Eigen::Index>(i)] = k == 0 ? b.lo : k == 1 ? b.hi : b.lo + rng.uniform() * b.width();
    }
    Vector t(static_cast<Eigen::Index>(tb.size()));
    if (problem.family.is_discrete()) {
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = rng.exponential();
      t /= t.sum();
    } else if (tb[0].lo > 0.0) {
      t[0] = std::exp(std::log(tb[0].lo) + rng.uniform() * (std::log(tb[0].hi) - std::log(tb[0].lo)));
    } else {
      t[0] = tb[0].lo + rng.uniform() * tb[0].width();
    }
    const auto theta = problem.theta_c.with_theta(t);
    const double v = problem.H_analytic ? problem.H_analytic(x, theta) : H_eval(problem, x, theta, 64, rng.split(k));
    if (!std::isfinite(v)) throw DomainError(problem.name + ": H is not finite on the box");
  }
}

double H_eval(const Problem& problem, const Decision& x, const ParamPoint& theta, std::size_t inner_m,
              Stream inner) {
  require_in_box(problem, x);
  if (problem.H_analytic) return problem.H_analytic(x, theta);
  if (inner_m == 0) throw InputError("H_eval: inner_m must be >= 1");
  double acc = 0.0;
  for (std::size_t j = 0; j < inner_m; ++j) acc += problem.h(x, draw(problem.family, theta, inner));
  return acc / static_cast<double>(inner_m);
}

Vector grad_H_theta(const Problem& problem, const Decision& x, const ParamPoint& theta,
                    const GradientOptions& opts) {
  require_in_box(problem, x);
  validate_parameter(problem.family, theta);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!theta.bounds()[i].interior(theta[static_cast<Eigen::Index>(i)])) {
      throw SingularityError(problem.name + ": gradient requested on the parameter boundary");
    }
  }
  if (problem.grad_H_analytic && opts.route == GradientRoute::Auto) return problem.grad_H_analytic(x, theta);

  const double rel = opts.rel_step > 0.0 ? opts.rel_step : (problem.H_analytic ? 1e-5 : 1e-3);
  const auto eval = [&](const Vector& t) { return H_eval(problem, x, theta.with_theta(t), opts.inner_m, opts.inner); };
  const auto& th = theta.theta();
  const auto& bounds = theta.bounds();
  const bool discrete = problem.family.is_discrete();
  const Eigen::Index dim = static_cast<Eigen::Index>(problem.family.info_dim());
  const Eigen::Index last = th.size() - 1;

  Vector g(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double step = rel * std::max(std::abs(th[i]), 1.0);
    const auto& b = bounds[static_cast<std::size_t>(i)];
    step = std::min({step, 0.5 * (th[i] - b.lo), 0.5 * (b.hi - th[i])});
    if (discrete) step = std::min(step, 0.5 * th[last]);
    Vector up = th;
    Vector down = th;
    up[i] += step;
    down[i] -= step;
    if (discrete) {
      // Moving a free coordinate moves the last one in the opposite direction.
      up[last] -= step;
      down[last] += step;
    }
    g[i] = (eval(up) - eval(down)) / (2.0 * step);
  }
  return g;
}

BroObjective::BroObjective(const Problem& problem, const PosteriorState& post, std::size_t outer_m,
                           std::size_t inner_m, Stream rng)
    : problem_(problem), inner_m_(inner_m), inner_base_(rng.split("inner")) {
  if (post.family() != problem.family) throw DomainError("BroObjective: posterior family does not match the problem");
  Stream outer = rng.split("outer");
  draws_ = posterior_sample(post, outer_m, outer);
}

std::vector<double> BroObjective::values(const Decision& x) const {
  require_in_box(problem_, x);
  std::vector<double> out(draws_.size());
  if (problem_.H_analytic) {
    for (std::size_t j = 0; j < draws_.size(); ++j) out[j] = problem_.H_analytic(x, draws_[j]);
    return out;
  }
  const Stream inner = inner_base_.split(hash_decision(x));
  for (std::size_t j = 0; j < draws_.size(); ++j) out[j] = H_eval(problem_, x, draws_[j], inner_m_, inner);
  return out;
}

double BroObjective::operator()(const RiskSpec& spec, const Decision& x) const { return apply_risk(spec, values(x)); }

std::vector<double> BroObjective::evaluate(std::span<const RiskSpec> specs, const Decision& x) const {
  const auto v = values(x);
  std::vector<double> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(apply_risk(s, v));
  return out;
}

double bro_objective(const Problem& problem, const RiskSpec& spec, const PosteriorState& post, const Decision& x,
                     std::size_t outer_m, std::size_t inner_m, Stream rng) {
  return BroObjective(problem, post, outer_m, inner_m, rng)(spec, x);
}

}  // namespace bro
