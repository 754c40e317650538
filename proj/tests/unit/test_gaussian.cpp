#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include "sklab/gaussian.hpp"

using namespace sklab;

namespace {

double double_factorial(int k) {
  double v = 1.0;
  for (; k > 1; k -= 2) v *= k;
  return v;
}

// Simpson integration of the standard normal density times g, as an
// independent oracle for one-dimensional expectations.
template <class F>
double simpson_normal(F g, double lo = -12.0, double hi = 12.0, int n = 20000) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * g(x) * std::exp(-0.5 * x * x);
  }
  return s * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

TEST(NormalCdf, CentreAndTail) {
  EXPECT_DOUBLE_EQ(std_normal_cdf(0.0), 0.5);
  EXPECT_GT(std_normal_cdf(8.0), 1.0 - 1e-14);
  // long-double erfc as the high-precision reference
  for (double x : {-6.0, -2.5, -0.3, 0.7, 1.9, 4.2}) {
    const long double ref = 0.5L * std::erfc(-static_cast<long double>(x) / std::sqrt(2.0L));
    EXPECT_NEAR(std_normal_cdf(x), static_cast<double>(ref), 1e-14) << x;
  }
}

TEST(NormalCdf, Symmetry) {
  const double x = 1.2345;
  EXPECT_NEAR(std_normal_cdf(-x), 1.0 - std_normal_cdf(x), 1e-15);
}

TEST(NormalCdf, Monotone) {
  double prev = 0.0;
  for (int i = -800; i <= 800; ++i) {
    const double v = std_normal_cdf(i / 100.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(NormalQuantile, KnownValues) {
  EXPECT_DOUBLE_EQ(std_normal_quantile(0.5), 0.0);
  EXPECT_NEAR(std_normal_quantile(std_normal_cdf(1.7)), 1.7, 1e-10);
  EXPECT_NEAR(std_normal_quantile(0.975), 1.959963984540054, 1e-9);
}

TEST(NormalQuantile, RoundTripProperty) {
  for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.77, 0.975, 0.9999, 1 - 1e-9}) {
    EXPECT_NEAR(std_normal_cdf(std_normal_quantile(p)), p, 1e-12 * std::max(1.0, p)) << p;
  }
}

TEST(NormalQuantile, DomainErrors) {
  EXPECT_THROW(std_normal_quantile(0.0), DomainError);
  EXPECT_THROW(std_normal_quantile(1.0), DomainError);
  EXPECT_THROW(std_normal_quantile(-0.2), DomainError);
  EXPECT_THROW(std_normal_quantile(std::nan("")), DomainError);
}

TEST(GaussHermite, OrderOne) {
  const QuadratureRule r = gauss_hermite_rule(1);
  ASSERT_EQ(r.size(), 1U);
  EXPECT_DOUBLE_EQ(r.nodes[0], 0.0);
  EXPECT_DOUBLE_EQ(r.weights[0], 1.0);
}

TEST(GaussHermite, Examples) {
  EXPECT_NEAR(gauss_hermite_rule(5).expect([](double x) { return x * x * x * x; }), 3.0, 1e-12);
  EXPECT_NEAR(gauss_hermite_rule(40).expect([](double x) { return std::exp(x); }), std::exp(0.5), 1e-10);
}

TEST(GaussHermite, OrderRange) {
  EXPECT_THROW(gauss_hermite_rule(0), DomainError);
  EXPECT_THROW(gauss_hermite_rule(201), DomainError);
  EXPECT_NO_THROW(gauss_hermite_rule(200));
}

TEST(GaussHermite, WeightsPositiveAndNormalized) {
  for (int m : {1, 2, 3, 7, 16, 33, 64, 100, 150, 200}) {
    const QuadratureRule r = gauss_hermite_rule(m);
    double s = 0.0;
    for (double w : r.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-12) << m;
  }
}

TEST(GaussHermite, PolynomialExactness) {
  for (int m = 1; m <= 60; ++m) {
    const QuadratureRule r = gauss_hermite_rule(m);
    for (int d = 0; d <= 2 * m - 1; ++d) {
      const double got = r.expect([d](double x) { return std::pow(x, d); });
      const double want = d % 2 ? 0.0 : double_factorial(d - 1);
      const double scale = 1.0 + double_factorial(d - 1);
      ASSERT_NEAR(got, want, 1e-9 * scale) << "m=" << m << " d=" << d;
    }
  }
}

TEST(GaussHermite, CachedRuleIsThreadSafe) {
  std::vector<std::jthread> ts;
  std::vector<double> sums(8);
  for (int i = 0; i < 8; ++i) {
    ts.emplace_back([i, &sums] { sums[i] = cached_gauss_hermite(30 + i).expect([](double x) { return x * x; }); });
  }
  ts.clear();
  for (double s : sums) EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(PiecewiseRule, MatchesSimpsonOnKinkedIntegrand) {
  const double cut[] = {0.4};
  auto f = [](double x) { return std::abs(x - 0.4) * std::cos(x); };
  EXPECT_NEAR(expect_normal(f, cut), simpson_normal(f), 1e-9);
}

TEST(BivariateCorrelation, Validation) {
  EXPECT_THROW(BivariateGaussianParams(1.5), DomainError);
  EXPECT_THROW(BivariateGaussianParams(-1.01), DomainError);
  EXPECT_NO_THROW(BivariateGaussianParams(-1.0));
  EXPECT_DOUBLE_EQ(BivariateGaussianParams(0.25).correlation(), 0.25);
}

TEST(ExpectBivariate, SpecExamples) {
  const QuadratureRule& r = cached_gauss_hermite();
  auto id = [](double x) { return x; };
  auto sq = [](double x) { return x * x; };
  EXPECT_NEAR(expect_bivariate(id, id, BivariateGaussianParams(0.3), r), 0.3, 1e-10);
  EXPECT_NEAR(expect_bivariate(sq, sq, BivariateGaussianParams(0.0), r), 1.0, 1e-10);
}

TEST(ExpectBivariate, SignProductWithBreakpoints) {
  auto sgn = [](double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); };
  const double cut[] = {0.0};
  for (double rho : {0.1, 0.5, 0.9, 0.99}) {
    const double oracle = 2.0 / std::numbers::pi * std::asin(rho);  // orthant identity
    EXPECT_NEAR(expect_bivariate(sgn, sgn, BivariateGaussianParams(rho), cut, cut), oracle, 1e-6) << rho;
  }
}

TEST(ExpectBivariate, SignProductPlainRuleIsDegraded) {
  auto sgn = [](double x) { return x > 0 ? 1.0 : -1.0; };
  const double got = expect_bivariate(sgn, sgn, BivariateGaussianParams(0.5), cached_gauss_hermite());
  EXPECT_NEAR(got, 1.0 / 3.0, 1e-2);
}

TEST(ExpectBivariate, CorrelationOneMatchesOneDimensional) {
  const QuadratureRule& r = cached_gauss_hermite();
  for (int deg = 1; deg <= 6; ++deg) {
    auto f = [deg](double x) { return std::pow(x, deg) - 0.5 * x + 0.25; };
    const double one_d = r.expect([&](double x) { return f(x) * f(x); });
    EXPECT_NEAR(expect_bivariate(f, f, BivariateGaussianParams(1.0), r), one_d, 1e-10 * (1 + one_d)) << deg;
  }
}

TEST(ExpectBivariate, IndependenceFactorizes) {
  const QuadratureRule& r = cached_gauss_hermite();
  for (int da = 1; da <= 6; ++da) {
    for (int db = 1; db <= 6; ++db) {
      auto fa = [da](double x) { return std::pow(x, da) + 0.3; };
      auto fb = [db](double x) { return std::pow(x - 0.2, db); };
      const double joint = expect_bivariate(fa, fb, BivariateGaussianParams(0.0), r);
      EXPECT_NEAR(joint, r.expect(fa) * r.expect(fb), 1e-10 * (1 + std::abs(joint)));
    }
  }
}

TEST(ExpectBivariate, NegativeCorrelation) {
  auto id = [](double x) { return x; };
  EXPECT_NEAR(expect_bivariate(id, id, BivariateGaussianParams(-0.6), cached_gauss_hermite()), -0.6, 1e-10);
}

TEST(ExpectBivariate, NonFiniteIsEvaluationError) {
  auto bad = [](double x) { return x > 1.0 ? std::numeric_limits<double>::infinity() : 0.0; };
  auto id = [](double x) { return x; };
  EXPECT_THROW(expect_bivariate(bad, id, BivariateGaussianParams(0.2), cached_gauss_hermite()), EvaluationError);
}

TEST(AbsPsi, IdentityIsEquality) {
  const AbsPsiReport r = verify_abs_psi_inequality([](double x) { return x; }, [](double) { return 1.0; });
  EXPECT_NEAR(r.lhs, std::sqrt(2.0 / std::numbers::pi), 1e-9);
  EXPECT_NEAR(r.rhs, std::sqrt(2.0 / std::numbers::pi), 1e-9);
  EXPECT_NEAR(r.lhs, r.rhs, 1e-9);
  EXPECT_TRUE(r.holds);
}

TEST(AbsPsi, ConstantPsi) {
  const AbsPsiReport r = verify_abs_psi_inequality([](double) { return 1.0; }, [](double) { return 0.0; });
  EXPECT_NEAR(r.lhs, 0.0, 1e-15);
  EXPECT_NEAR(r.rhs, 0.5 * std::sqrt(2.0 / std::numbers::pi), 1e-10);
  EXPECT_TRUE(r.holds);
}

TEST(AbsPsi, TanhHolds) {
  const AbsPsiReport r = verify_abs_psi_inequality([](double x) { return std::tanh(x); },
                                                   [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); });
  EXPECT_TRUE(r.holds);
  // Integrating by parts, rhs - lhs = psi(0)^2 phi(0) for odd increasing psi,
  // so tanh sits on the equality case just like psi(x) = x.
  EXPECT_NEAR(r.rhs - r.lhs, 0.0, 1e-9);
  // both sides against Simpson
  EXPECT_NEAR(r.lhs, simpson_normal([](double x) { return std::abs(std::tanh(x)) / (std::cosh(x) * std::cosh(x)); }), 1e-9);
  EXPECT_NEAR(r.rhs, 0.5 * simpson_normal([](double x) { return std::abs(x) * std::tanh(x) * std::tanh(x); }), 1e-9);
}

TEST(AbsPsi, GapEqualsBoundaryTerm) {
  // psi = tanh(x) + c: rhs - lhs = c^2 phi(0) by the same integration by parts
  const double c = 0.4;
  const AbsPsiReport r = verify_abs_psi_inequality([c](double x) { return std::tanh(x + 0.0) + c; },
                                                   [](double x) { return 1.0 / (std::cosh(x) * std::cosh(x)); });
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.rhs, r.lhs);
}

TEST(AbsPsi, RegressionSuiteOfTen) {
  struct Case {
    RealFunction psi, dpsi;
  };
  const std::vector<Case> suite = {
      {[](double x) { return x; }, [](double) { return 1.0; }},
      {[](double x) { return x * x; }, [](double x) { return 2 * x; }},
      {[](double x) { return x * x * x - x; }, [](double x) { return 3 * x * x - 1; }},
      {[](double x) { return x * x * x * x - 2 * x; }, [](double x) { return 4 * x * x * x - 2; }},
      {[](double x) { return 1 + x + 0.5 * x * x; }, [](double x) { return 1 + x; }},
      {[](double x) { return std::tanh(x); }, [](double x) { return 1 / (std::cosh(x) * std::cosh(x)); }},
      {[](double x) { return std::tanh(2 * x - 1); }, [](double x) { return 2 / (std::cosh(2 * x - 1) * std::cosh(2 * x - 1)); }},
      {[](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }},
      {[](double x) { return std::exp(-x * x / 2); }, [](double x) { return -x * std::exp(-x * x / 2); }},
      {[](double x) { return 3 * std::exp(-(x - 1) * (x - 1)); }, [](double x) { return -6 * (x - 1) * std::exp(-(x - 1) * (x - 1)); }},
  };
  for (std::size_t i = 0; i < suite.size(); ++i) {
    EXPECT_TRUE(verify_abs_psi_inequality(suite[i].psi, suite[i].dpsi).holds) << i;
  }
}

TEST(AbsPsi, NonFiniteIsEvaluationError) {
  EXPECT_THROW(verify_abs_psi_inequality([](double x) { return 1.0 / (x - x); }, [](double) { return 0.0; }),
               EvaluationError);
}
