#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "bro/bayes.hpp"
#include "bro/error.hpp"
#include "bro/objective.hpp"
#include "bro/rng.hpp"

using namespace bro;

namespace {

Decision d1(double v) { return Decision::Constant(1, v); }

Problem newsvendor() { return newsvendor_exponential(1, 3, 1, {0, 4}); }

Problem portfolio() {
  Matrix payoff(3, 2);
  payoff << 0.6, 1.2, 0.4, -1.0, -0.5, 0.9;
  Vector tc = Vector::Constant(3, 1.0 / 3.0);
  return discrete_portfolio({0, 1, 2}, payoff, 1.0, tc, Box{{Interval{0, 1}, Interval{0, 1}}});
}

}  // namespace

TEST(HEval, ReferenceValues) {
  const auto nv = newsvendor();
  EXPECT_NEAR(H_eval(nv, d1(std::log(3.0)), nv.theta_c, 1, Stream(0)), -0.9013877113318903, 1e-14);
  EXPECT_EQ(H_eval(nv, d1(0.0), nv.theta_c, 1, Stream(0)), 0.0);
  const auto ln = linear_normal(1, 0.7, {-1, 1});
  EXPECT_EQ(H_eval(ln, d1(0.0), ln.theta_c, 1, Stream(0)), 0.0);
  EXPECT_THROW((void)H_eval(nv, d1(5.0), nv.theta_c, 1, Stream(0)), DomainError);
}

TEST(HEval, MonteCarloMatchesClosedForm) {
  const auto nv = newsvendor();
  const auto mc = nv.without_closed_forms();
  const double exact = H_eval(nv, d1(std::log(3.0)), nv.theta_c, 1, Stream(0));
  // sd of h is below 2 here; 1e6 draws give a standard error under 0.002.
  EXPECT_NEAR(H_eval(mc, d1(std::log(3.0)), nv.theta_c, 1000000, Stream(5)), exact, 0.006);

  const auto pf = portfolio();
  const Decision x = (Decision(2) << 0.4, 0.7).finished();
  EXPECT_NEAR(H_eval(pf.without_closed_forms(), x, pf.theta_c, 1000000, Stream(6)),
              H_eval(pf, x, pf.theta_c, 1, Stream(0)), 0.005);
}

TEST(GradH, ReferenceValues) {
  const auto ln = linear_normal(4, 0.3, {-3, 3});
  EXPECT_DOUBLE_EQ(grad_H_theta(ln, d1(2.0), ln.theta_c)[0], 2.0);
  EXPECT_EQ(grad_H_theta(ln, d1(0.0), ln.theta_c)[0], 0.0);
  const auto nv = newsvendor();
  EXPECT_NEAR(grad_H_theta(nv, d1(1.0), nv.theta_c)[0], 0.7927233529713461, 1e-14);
}

TEST(GradH, AnalyticMatchesFiniteDifference) {
  GradientOptions fd;
  fd.route = GradientRoute::FiniteDifference;
  const auto nv = newsvendor();
  for (double x : {0.3, 1.0, 2.5}) {
    const double a = grad_H_theta(nv, d1(x), nv.theta_c)[0];
    EXPECT_NEAR(grad_H_theta(nv, d1(x), nv.theta_c, fd)[0], a, 1e-6 * std::abs(a));
  }
  const auto pf = portfolio();
  const Decision x = (Decision(2) << 0.4, 0.7).finished();
  const Vector a = grad_H_theta(pf, x, pf.theta_c);
  const Vector f = grad_H_theta(pf, x, pf.theta_c, fd);
  ASSERT_EQ(a.size(), 2);
  EXPECT_LE((a - f).norm(), 1e-6 * a.norm());
}

TEST(GradH, MonteCarloRouteUsesCommonRandomNumbers) {
  const auto nv = newsvendor();
  GradientOptions mc;
  mc.inner_m = 200000;
  mc.inner = Stream(3);
  const double g = grad_H_theta(nv.without_closed_forms(), d1(1.0), nv.theta_c, mc)[0];
  EXPECT_NEAR(g, 0.7927233529713461, 0.01);
}

TEST(BroObjective, MeanMatchesQuadrature) {
  const auto nv = newsvendor();
  const auto post = posterior_update(PriorSpec::gamma(7, 11), {});
  const double v = bro_objective(nv, RiskSpec::mean(), post, d1(1.0), 1000000, 1, Stream(17));
  EXPECT_NEAR(v, -1.2368929304376715, 0.005);
}

TEST(BroObjective, WorstCaseEqualsMaxOverDraws) {
  const auto nv = newsvendor();
  const auto post = posterior_update(PriorSpec::gamma(3, 2), {});
  Stream pick(4);
  for (int k = 0; k < 20; ++k) {
    const BroObjective obj(nv, post, 50, 1, Stream(100 + k));
    const Decision x = d1(4.0 * pick.uniform());
    double worst = -INFINITY;
    for (const auto& t : obj.draws()) worst = std::max(worst, H_eval(nv, x, t, 1, Stream(0)));
    EXPECT_EQ(obj(RiskSpec::value_at_risk(1.0), x), worst);
  }
}

TEST(BroObjective, DegeneratePosteriorGivesH) {
  const auto ln = linear_normal(1, 0.5, {-1, 1});
  std::vector<double> data(1000000, 0.5);
  const auto post = posterior_update(PriorSpec::normal(0, 1, 1), data);
  const double v = bro_objective(ln, RiskSpec::mean(), post, d1(0.8), 500, 1, Stream(2));
  EXPECT_NEAR(v, 0.4, 1e-3);
}

TEST(BroObjective, RiskOrderingOnSharedDraws) {
  const auto nv = newsvendor();
  const auto post = posterior_update(PriorSpec::gamma(5, 4), {});
  const BroObjective obj(nv, post, 2000, 1, Stream(9));
  for (double x : {0.0, 0.5, 1.5, 3.0}) {
    const auto v = obj.evaluate(std::vector<RiskSpec>{RiskSpec::mean(), RiskSpec::cvar(0.9),
                                                      RiskSpec::value_at_risk(0.8), RiskSpec::value_at_risk(0.95)},
                                d1(x));
    EXPECT_LE(v[0], v[1]);
    EXPECT_LE(v[2], v[3]);
  }
}

TEST(BroObjective, MidpointConvexityInX) {
  const auto nv = newsvendor();
  const auto post = posterior_update(PriorSpec::gamma(5, 4), {});
  const BroObjective obj(nv, post, 1000, 1, Stream(10));
  for (const auto& spec : {RiskSpec::mean(), RiskSpec::cvar(0.9)}) {
    std::vector<double> v;
    for (int i = 0; i <= 100; ++i) v.push_back(obj(spec, d1(0.04 * i)));
    for (int i = 1; i < 100; ++i) EXPECT_LE(v[i], 0.5 * (v[i - 1] + v[i + 1]) + 1e-9);
  }
}

TEST(BroObjective, DeterministicAndCommonRandomNumbers) {
  const auto nv = newsvendor().without_closed_forms();
  const auto post = posterior_update(PriorSpec::gamma(5, 4), {});
  const BroObjective a(nv, post, 100, 200, Stream(11));
  const BroObjective b(nv, post, 100, 200, Stream(11));
  EXPECT_EQ(a.values(d1(1.2)), b.values(d1(1.2)));
  EXPECT_EQ(a.values(d1(1.2)), a.values(d1(1.2)));
  EXPECT_THROW((void)BroObjective(nv, posterior_update(PriorSpec::normal(0, 1, 1), {}), 10, 10, Stream(1)),
               DomainError);
}

TEST(Builtins, SingletonFlags) {
  EXPECT_TRUE(newsvendor().singleton_solution);
  EXPECT_NEAR((*newsvendor().known_optimum)[0], std::log(3.0), 1e-15);
  EXPECT_FALSE(linear_normal(1, 0.0, {-1, 1}).singleton_solution);
  EXPECT_TRUE(linear_normal(1, 0.2, {-1, 1}).singleton_solution);
  EXPECT_TRUE(portfolio().singleton_solution);
  EXPECT_NO_THROW(check_finite(portfolio()));
}
