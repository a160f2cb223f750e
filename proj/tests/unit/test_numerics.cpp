#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "bro/error.hpp"
#include "bro/exact_sum.hpp"
#include "bro/normal.hpp"
#include "bro/rng.hpp"

using namespace bro;

TEST(Stream, SameSeedSameSequence) {
  Stream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Stream, SplitsAreIndependentOfParentPosition) {
  Stream a(7);
  const auto child_before = a.split("data").next_u64();
  for (int i = 0; i < 10; ++i) (void)a.next_u64();
  EXPECT_EQ(a.split("data").next_u64(), child_before);
  EXPECT_NE(a.split("data").next_u64(), a.split("posterior").next_u64());
  EXPECT_NE(a.split({1, 2}).next_u64(), a.split({2, 1}).next_u64());
}

TEST(Stream, UniformIsOpenInterval) {
  Stream s(1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(Stream, SamplerMoments) {
  Stream s(99);
  const int n = 400000;
  double sn = 0, sn2 = 0, se = 0, sg = 0, sg_small = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
    se += s.exponential();
    sg += s.gamma(3.5);
    sg_small += s.gamma(0.4);
  }
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.01);
  EXPECT_NEAR(se / n, 1.0, 0.01);
  EXPECT_NEAR(sg / n, 3.5, 0.02);
  EXPECT_NEAR(sg_small / n, 0.4, 0.005);
}

TEST(Fnv1a, KnownVector) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(ExactSum, OrderIndependent) {
  std::vector<double> xs;
  Stream s(5);
  for (int i = 0; i < 1000; ++i) xs.push_back(std::ldexp(s.uniform() - 0.5, static_cast<int>(s.next_u64() % 80) - 40));
  ExactSum a;
  a.add(xs);
  std::mt19937_64 g(3);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(xs.begin(), xs.end(), g);
    ExactSum b;
    b.add(xs);
    EXPECT_EQ(a.value(), b.value());
  }
}

TEST(ExactSum, CancellationIsExact) {
  ExactSum s;
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 1.0);
  EXPECT_EQ(s.value(2.0), 3.0);
  ExactSum tenths;
  for (int i = 0; i < 10; ++i) tenths.add(0.1);
  EXPECT_EQ(tenths.value(), 1.0);
}

TEST(Normal, ReferenceValues) {
  EXPECT_NEAR(normal::quantile(0.975), 1.959963984540054, 1e-13);
  EXPECT_NEAR(normal::quantile(0.95), 1.6448536269514727, 1e-13);
  EXPECT_EQ(normal::quantile(0.5), 0.0);
  EXPECT_NEAR(normal::pdf(0.0), 0.3989422804014327, 1e-15);
  EXPECT_NEAR(normal::cdf(1.959963984540054), 0.975, 1e-14);
  EXPECT_THROW((void)normal::quantile(0.0), DomainError);
  EXPECT_THROW((void)normal::quantile(1.0), DomainError);
  EXPECT_THROW((void)normal::quantile(std::nan("")), DomainError);
}
