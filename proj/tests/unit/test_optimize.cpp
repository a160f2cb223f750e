#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bro/error.hpp"
#include "bro/objective.hpp"
#include "bro/optimize.hpp"

using namespace bro;

namespace {

Decision d1(double v) { return Decision::Constant(1, v); }
Decision d2(double a, double b) { return (Decision(2) << a, b).finished(); }

OptimizerConfig with(OptimizerMethod m) {
  OptimizerConfig c;
  c.method = m;
  return c;
}

}  // namespace

TEST(Minimize, Quadratic) {
  const auto f = [](const Decision& x) { return (x[0] - 2) * (x[0] - 2); };
  for (auto m : {OptimizerMethod::GridRefine, OptimizerMethod::NelderMead}) {
    const auto r = minimize(f, Box::interval(0, 4), with(m));
    EXPECT_NEAR(r.x_star[0], 2.0, 1e-4) << to_string(m);
    EXPECT_LE(r.value, 1e-8) << to_string(m);
    EXPECT_EQ(r.status, SolveStatus::Converged) << to_string(m);
  }
}

TEST(Minimize, NewsvendorTrueObjective) {
  const auto nv = newsvendor_exponential(1, 3, 1, {0, 4});
  const auto f = [&](const Decision& x) { return nv.H_analytic(x, nv.theta_c); };
  const auto grid = minimize(f, nv.decision_box, with(OptimizerMethod::GridRefine));
  const auto nm = minimize(f, nv.decision_box, with(OptimizerMethod::NelderMead));
  EXPECT_NEAR(grid.x_star[0], std::log(3.0), 1e-3);
  EXPECT_NEAR(nm.x_star[0], std::log(3.0), 1e-3);
  EXPECT_NEAR(grid.x_star[0], nm.x_star[0], 1e-3);
}

TEST(Minimize, FlatObjective) {
  const auto f = [](const Decision&) { return 2.5; };
  for (auto m : {OptimizerMethod::GridRefine, OptimizerMethod::NelderMead}) {
    const auto r = minimize(f, Box::interval(-1, 1), with(m));
    EXPECT_EQ(r.status, SolveStatus::Flat) << to_string(m);
    EXPECT_EQ(r.value, 2.5);
    EXPECT_TRUE(Box::interval(-1, 1).contains(r.x_star));
  }
}

TEST(Minimize, TwoDimensionalStaysInBox) {
  // Unconstrained minimum (1.5, -0.5) lies outside the box.
  const auto f = [](const Decision& x) { return (x[0] - 1.5) * (x[0] - 1.5) + (x[1] + 0.5) * (x[1] + 0.5); };
  const Box box{{Interval{0, 1}, Interval{0, 1}}};
  const auto r = minimize(f, box);
  EXPECT_TRUE(box.contains(r.x_star));
  EXPECT_NEAR(r.x_star[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x_star[1], 0.0, 1e-4);
}

TEST(Minimize, TraceAndValidation) {
  OptimizerConfig c;
  c.keep_trace = true;
  const auto r = minimize([](const Decision& x) { return std::abs(x[0]); }, Box::interval(-1, 2), c);
  EXPECT_EQ(r.trace.size(), r.evaluations);
  c.grid_points = 2;
  EXPECT_THROW((void)minimize([](const Decision& x) { return x[0]; }, Box::interval(0, 1), c), InputError);
}

TEST(ArgminSet, Examples) {
  const auto sq = argmin_set([](const Decision& x) { return (x[0] - 2) * (x[0] - 2); }, Box::interval(0, 4), 101, 1e-9);
  ASSERT_EQ(sq.size(), 1u);
  EXPECT_EQ(sq[0][0], 2.0);
  EXPECT_EQ(argmin_set([](const Decision&) { return 1.0; }, Box::interval(0, 4), 101, 1e-9).size(), 101u);
  const auto two =
      argmin_set([](const Decision& x) { return std::abs(x[0] - 1) * std::abs(x[0] - 3); }, Box::interval(0, 4), 101,
                 1e-9);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0][0], 1.0);
  EXPECT_EQ(two[1][0], 3.0);
}

TEST(SolutionDeviation, Examples) {
  const std::vector<Decision> a{d1(1), d1(2)}, b{d1(1.5)};
  EXPECT_EQ(solution_deviation(a, b), 0.5);
  const std::vector<Decision> sub{d1(2)};
  EXPECT_EQ(solution_deviation(sub, a), 0.0);
  EXPECT_EQ(solution_deviation(std::vector<Decision>{d2(0, 0)}, std::vector<Decision>{d2(3, 4)}), 5.0);
  // Not symmetric.
  EXPECT_EQ(solution_deviation(b, a), 0.5);
  const std::vector<Decision> wide{d1(0), d1(3)}, narrow{d1(0)};
  EXPECT_EQ(solution_deviation(narrow, wide), 0.0);
  EXPECT_EQ(solution_deviation(wide, narrow), 3.0);
}

TEST(MakeGrid, EndpointsExact) {
  const auto g = make_grid(Box::interval(0, 4), 101);
  ASSERT_EQ(g.size(), 101u);
  EXPECT_EQ(g.front()[0], 0.0);
  EXPECT_EQ(g.back()[0], 4.0);
  EXPECT_EQ(make_grid(Box{{Interval{0, 1}, Interval{0, 1}}}, 5).size(), 25u);
}
