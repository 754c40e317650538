#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sklab/bounds.hpp"

using namespace sklab;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double simpson_normal(F g, int n = 4000) {
  const double lo = -10.0, hi = 10.0, h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g(x) * std::exp(-0.5 * x * x);
  }
  return s * h / 3.0 / std::sqrt(2.0 * kPi);
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

}  // namespace

TEST(R0, Examples) {
  EXPECT_NEAR(r0_of_t(1.0, 0.0), std::cbrt(2.0) + 1.0, 1e-12);
  EXPECT_NEAR(r0_of_t(1.0, 0.0), 2.259921, 1e-6);
  EXPECT_NEAR(r0_of_t(1.7, 0.99) / r0_of_t(1.7, 0.9), 10.0, 1e-9);
  const double abs3_gauss = 2.0 * std::sqrt(2.0 / kPi);
  EXPECT_NEAR(r0_of_t(abs3_gauss, 0.5), 6.020, 2e-3);
  EXPECT_THROW(r0_of_t(1.0, 1.0), DomainError);
}

TEST(R1, Examples) {
  const double a = 1.3;
  EXPECT_NEAR(r1_of_t(a, 0.7, 0.0, 2.0), 2.0 * (std::log(std::sqrt(2.0)) + a + 1 + a), 1e-12);
  EXPECT_THROW(r1_of_t(1.0, 0.5, 1.0 - std::exp(-1.0) + 1e-12), AdmissibilityError);
  // independent evaluation: 0.5 log(2 / (1 - 0.36 log 2)) + 2 / 0.5 + 1
  const double oracle = 0.5 * std::log(2.0 / (1.0 - 0.36 * std::log(2.0))) + 5.0;
  EXPECT_NEAR(r1_of_t(1.0, 0.3, 0.5, 1.0), oracle, 1e-12);
  EXPECT_NEAR(r1_of_t(1.0, 0.3, 0.5, 1.0), 5.4901, 1e-3);
}

TEST(R1, IncreasingInT) {
  const double beta = 0.4;
  double prev = r1_of_t(1.2, beta, 0.0);
  for (int i = 1; i < 200; ++i) {
    const double t = 0.0025 * i;
    if (!r1_admissible(beta, t)) break;
    const double v = r1_of_t(1.2, beta, t);
    EXPECT_GE(v - prev, -1e-12) << t;
    prev = v;
  }
}

TEST(Thm1, GaussianAtEToTheE) {
  const BoundInputs in = BoundInputs::from_spec(make_gaussian(), 15, 1.0);
  const double n = std::exp(std::numbers::e);
  const double expected = (in.abs3 + 1) * n * (1 - std::exp(-1.0 / std::numbers::e) + 1.0 / std::numbers::e);
  EXPECT_NEAR(detail::thm1_value(n, in, [](double t) { return t; }), expected, 1e-10 * expected);
}

TEST(Thm1, SmallNClamps) {
  EXPECT_GT(std::pow(std::log(2.0), -1.0 / std::log(2.0)), 1.0);
  EXPECT_EQ(thm1_r_n(2, 1.0), 1.0);
  const BoundInputs in = BoundInputs::from_spec(make_uniform(), 2, 1.0);
  // w(1) = 1 so only the 1/log N term remains
  EXPECT_NEAR(thm1_rhs(in, make_uniform()), (in.abs3 + 1) * 2 / std::log(2.0), 1e-8);
}

TEST(Thm1, UniformRateDecreases) {
  const DisorderSpec u = make_uniform();
  double prev = std::numeric_limits<double>::infinity();
  for (int n : {100, 1000, 10000}) {
    const BoundInputs in = BoundInputs::from_spec(u, n, 1.0);
    const double rate = thm1_rhs(in, u) / ((in.abs3 + 1) * n);
    EXPECT_LT(rate, prev) << n;
    prev = rate;
  }
}

TEST(Thm1, ExponentIdentity) {
  for (double c : {0.5, 1.0, 2.0}) {
    for (double n : {3.0, 10.0, 1e2, 1e6}) {
      const double ln = std::log(n);
      EXPECT_LE(1 - std::pow(ln, -c / ln), c * std::log(ln) / ln + 1e-15) << c << " " << n;
    }
  }
}

TEST(Thm2, Examples) {
  const BoundInputs g = BoundInputs::from_spec(make_gaussian(), 7, 1.0);
  ASSERT_TRUE(g.fprime3.has_value());
  EXPECT_NEAR(*g.fprime3, 1.0, 1e-12);
  EXPECT_NEAR(detail::thm2_value(std::exp(2.0), g), std::exp(2.0), 1e-12);
  BoundInputs two = g, four = g;
  two.n = 2;
  four.n = 4;
  EXPECT_NEAR(thm2_rhs(two), thm2_rhs(four), 1e-12);
}

TEST(Thm2, UniformThirdMoment) {
  const BoundInputs u = BoundInputs::from_spec(make_uniform(), 10, 1.0);
  ASSERT_TRUE(u.fprime3.has_value());
  const double oracle = simpson_normal([](double x) { return std::pow(2 * std::sqrt(3.0) * phi(x), 3); });
  EXPECT_NEAR(*u.fprime3, oracle, 1e-9);
  EXPECT_TRUE(std::isfinite(thm2_rhs(u)));
}

TEST(Thm2, MissingMoment) {
  const BoundInputs r = BoundInputs::from_spec(make_rademacher(), 10, 1.0);
  EXPECT_THROW(thm2_rhs(r), MissingMomentError);
}

TEST(Bounds, HomogeneousInK) {
  for (const DisorderSpec& s : {make_gaussian(), make_uniform(), make_lipschitz_named("tanh")}) {
    BoundInputs a = BoundInputs::from_spec(s, 9, 1.0, 1.0, 1.0);
    BoundInputs b = a;
    b.K_const = 2.0;
    EXPECT_EQ(thm1_rhs(b, s), 2.0 * thm1_rhs(a, s));
    EXPECT_EQ(thm2_rhs(b), 2.0 * thm2_rhs(a));
  }
}

TEST(Bounds, InputValidation) {
  BoundInputs in;
  in.n = 1;
  EXPECT_THROW(in.validate(), DomainError);
  in.n = 4;
  in.abs3 = 0.5;
  EXPECT_THROW(in.validate(), DomainError);
  for (const DisorderSpec& s : {make_gaussian(), make_uniform(), make_two_point(0.3), make_rademacher(),
                                mollify(make_rademacher(), 4)}) {
    EXPECT_GE(s.moments().abs3, 1.0 - 1e-8) << s.name();
  }
}

TEST(Remark1, Examples) {
  const DisorderSpec g = make_gaussian();
  for (int i = 0; i <= 10; ++i) {
    const Remark1Report r = remark1_bound(g, i / 10.0);
    EXPECT_NEAR(r.lhs, r.rhs, 1e-12);
    EXPECT_TRUE(r.holds);
  }
  const DisorderSpec u = make_uniform();
  const Remark1Report r = remark1_bound(u, 0.5);
  const double fp2 = simpson_normal([](double x) { return 12 * phi(x) * phi(x); });
  EXPECT_NEAR(r.lhs, 1 - 6 / kPi * std::asin(0.25), 1e-12);
  EXPECT_NEAR(r.rhs, 0.5 * fp2, 1e-9);
  EXPECT_TRUE(r.holds);
  const Remark1Report end = remark1_bound(u, 1.0);
  EXPECT_NEAR(end.lhs, 0.0, 1e-12);
  EXPECT_EQ(end.rhs, 0.0);
  EXPECT_THROW(remark1_bound(make_rademacher(), 0.5), MissingMomentError);
}

TEST(RatioStudy, TinyBetaHasNoVariance) {
  const int ns[] = {4, 6};
  for (const BoundReport& r : bound_ratio_study(make_gaussian(), 1e-12, ns, 1.0, 50, 3)) {
    EXPECT_LT(r.measured_var, 1e-18);
    EXPECT_LT(r.ratio_thm1, 1e-18);
    ASSERT_TRUE(r.ratio_thm2.has_value());
    EXPECT_LT(*r.ratio_thm2, 1e-18);
  }
}

TEST(RatioStudy, RowsAreConsistent) {
  const int ns[] = {4, 6, 8};
  const auto rows = bound_ratio_study(make_uniform(), 1.0, ns, 1.0, 300, 7);
  ASSERT_EQ(rows.size(), 3u);
  for (const BoundReport& r : rows) {
    EXPECT_GT(r.measured_var, 0.0);
    EXPECT_DOUBLE_EQ(r.ratio_thm1, r.measured_var / r.rhs_thm1);
    EXPECT_DOUBLE_EQ(*r.ratio_thm2, r.measured_var / *r.rhs_thm2);
  }
  const auto rad = bound_ratio_study(make_rademacher(), 1.0, ns, 1.0, 50, 7);
  EXPECT_FALSE(rad[0].rhs_thm2.has_value());
}
