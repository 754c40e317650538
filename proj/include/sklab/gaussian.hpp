#pragma once

// Scalar and bivariate standard-normal numerics.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sklab/errors.hpp"

namespace sklab {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343819;  // 1/sqrt(2 pi)
inline constexpr double kSqrt2Pi = 2.5066282746310005024157652848110453;

using RealFunction = std::function<double(double)>;

inline double std_normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

inline double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

/// Inverse of the standard normal CDF. Rational initial guess (Acklam) followed
/// by one Halley step against std_normal_cdf.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0,1), got " + std::to_string(p));
  }
  if (p > 0.5) return -std_normal_quantile(1.0 - p);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};

  double x;
  if (p < 0.02425) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = std_normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

/// Nodes and weights for expectations against a probability density.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int order = 0;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double expect(F&& f) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double v = f(nodes[i]);
      if (!std::isfinite(v)) {
        throw EvaluationError("non-finite integrand value at node " + std::to_string(nodes[i]));
      }
      acc += weights[i] * v;
    }
    return acc;
  }
};

inline constexpr int kDefaultQuadratureOrder = 64;

/// Gauss-Hermite rule normalized for E f(g), g ~ N(0,1).
///
/// Nodes come from the symmetric Jacobi matrix of the probabilists' Hermite
/// polynomials and are polished by Newton steps on the orthonormal recurrence;
/// weights are Christoffel numbers 1 / sum_k p_k(x)^2, which keeps the tiny
/// outer weights accurate in relative terms.
inline QuadratureRule gauss_hermite_rule(int order) {
  if (order < 1 || order > 200) {
    throw DomainError("gauss_hermite_rule: order must lie in [1, 200], got " +
                      std::to_string(order));
  }
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 1.0;
    return rule;
  }

  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(n - 1);
  for (int k = 1; k < n; ++k) sub[k - 1] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = solver.eigenvalues();

  // Orthonormal recurrence: returns p_n(x), p_{n-1}(x) and sum_{k<n} p_k(x)^2.
  auto recur = [n](double x, double& pn, double& pn1, double& sumsq) {
    double prev = 0.0;
    double cur = 1.0;
    sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
      sumsq += cur * cur;
      const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                          std::sqrt(static_cast<double>(k + 1));
      prev = cur;
      cur = next;
    }
    pn = cur;
    pn1 = prev;
  };

  std::vector<double> x(ev.data(), ev.data() + n);
  std::sort(x.begin(), x.end());
  for (int i = 0; i < n; ++i) {
    double pn, pn1, s;
    for (int it = 0; it < 3; ++it) {
      recur(x[i], pn, pn1, s);
      const double step = pn / (std::sqrt(static_cast<double>(n)) * pn1);
      x[i] -= step;
      if (std::abs(step) < 1e-16 * (1.0 + std::abs(x[i]))) break;
    }
  }
  for (int i = 0; i < n / 2; ++i) {
    const double m = 0.5 * (x[n - 1 - i] - x[i]);
    x[i] = -m;
    x[n - 1 - i] = m;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  for (int i = 0; i < n; ++i) {
    double pn, pn1, s;
    recur(x[i], pn, pn1, s);
    rule.nodes[i] = x[i];
    rule.weights[i] = 1.0 / s;
  }
  for (int i = 0; i < n / 2; ++i) {
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Gauss-Legendre nodes/weights on [-1, 1].
inline QuadratureRule gauss_legendre_rule(int order) {
  if (order < 1) throw DomainError("gauss_legendre_rule: order must be positive");
  const int n = order;
  QuadratureRule rule;
  rule.order = n;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * k - 1.0) * z * p2 - (k - 1.0) * p3) / k;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) < 1e-16) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

namespace detail {

template <class Builder>
const QuadratureRule& cached_rule(std::map<int, std::unique_ptr<QuadratureRule>>& cache,
                                  std::mutex& mu, int order, Builder build) {
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<QuadratureRule>(build(order));
  return *slot;
}

}  // namespace detail

inline const QuadratureRule& cached_gauss_hermite(int order = kDefaultQuadratureOrder) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mu;
  return detail::cached_rule(cache, mu, order, gauss_hermite_rule);
}

inline const QuadratureRule& cached_gauss_legendre(int order) {
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  static std::mutex mu;
  return detail::cached_rule(cache, mu, order, gauss_legendre_rule);
}

struct PiecewiseOptions {
  double half_width = 12.0;   // tail mass beyond is 2*Phi(-12) ~ 3.6e-33
  double max_piece = 0.5;
  int order_per_piece = 16;
};

/// Composite Gauss-Legendre rule for E f(g) on [-L, L] that splits at the given
/// breakpoints, so integrands with jumps or kinks there are integrated to
/// near machine precision. The weights carry the normal density.
inline QuadratureRule piecewise_normal_rule(std::span<const double> breakpoints,
                                            const PiecewiseOptions& opt = {}) {
  std::vector<double> cuts{-opt.half_width, opt.half_width};
  for (double b : breakpoints) {
    if (std::isfinite(b) && b > -opt.half_width && b < opt.half_width) cuts.push_back(b);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double u, double v) { return std::abs(u - v) < 1e-14; }),
             cuts.end());

  const QuadratureRule& gl = cached_gauss_legendre(opt.order_per_piece);
  QuadratureRule rule;
  rule.order = opt.order_per_piece;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double lo = cuts[c];
    const double hi = cuts[c + 1];
    const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / opt.max_piece)));
    const double h = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double a = lo + p * h;
      const double mid = a + 0.5 * h;
      for (std::size_t i = 0; i < gl.size(); ++i) {
        const double x = mid + 0.5 * h * gl.nodes[i];
        rule.nodes.push_back(x);
        rule.weights.push_back(0.5 * h * gl.weights[i] * std_normal_pdf(x));
      }
    }
  }
  return rule;
}

/// E f(g) with breakpoints where f (or a derivative) is discontinuous.
template <class F>
double expect_normal(F&& f, std::span<const double> breakpoints = {},
                     const PiecewiseOptions& opt = {}) {
  return piecewise_normal_rule(breakpoints, opt).expect(std::forward<F>(f));
}

/// Locations in [lo, hi] where f changes sign, refined by bisection.
inline std::vector<double> sign_changes(const RealFunction& f, double lo, double hi,
                                        int grid = 2400) {
  std::vector<double> roots;
  const double h = (hi - lo) / grid;
  double xa = lo;
  double fa = f(xa);
  for (int i = 1; i <= grid; ++i) {
    const double xb = lo + i * h;
    const double fb = f(xb);
    if (fa == 0.0) {
      roots.push_back(xa);
    } else if ((fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0)) {
      double l = xa, r = xb, fl = fa;
      for (int it = 0; it < 80 && r - l > 1e-15 * (1.0 + std::abs(l)); ++it) {
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        if ((fm < 0.0) == (fl < 0.0) && fm != 0.0) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    xa = xb;
    fa = fb;
  }
  return roots;
}

/// Correlation of a standard bivariate normal pair.
class BivariateGaussianParams {
 public:
  explicit BivariateGaussianParams(double correlation) : rho_(correlation) {
    if (!(std::abs(correlation) <= 1.0)) {
      throw DomainError("correlation must lie in [-1, 1], got " + std::to_string(correlation));
    }
  }
  double correlation() const { return rho_; }

 private:
  double rho_;
};

/// E fa(X) fb(Y) for (X, Y) standard bivariate normal.
///
/// Uses X = sqrt|r| G + sqrt(1-|r|) G', Y = +-sqrt|r| G + sqrt(1-|r|) G'' with
/// three independent copies of `rule`; conditioning on G the inner sums
/// factorize, so the cost is O(order^2). Correlations within 1e-12 of +-1 are
/// clamped. Accuracy degrades for discontinuous fa/fb.
template <class FA, class FB>
double expect_bivariate(FA&& fa, FB&& fb, const BivariateGaussianParams& params,
                        const QuadratureRule& rule) {
  constexpr double kClamp = 1.0 - 1e-12;
  const double rho = std::clamp(params.correlation(), -kClamp, kClamp);
  const double shared = std::sqrt(std::abs(rho));
  const double own = std::sqrt(1.0 - std::abs(rho));
  const double sign = rho < 0.0 ? -1.0 : 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double xs = shared * rule.nodes[i];
    double ia = 0.0;
    double ib = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
      const double va = fa(xs + own * rule.nodes[j]);
      const double vb = fb(sign * xs + own * rule.nodes[j]);
      if (!std::isfinite(va) || !std::isfinite(vb)) {
        throw EvaluationError("expect_bivariate: non-finite integrand value");
      }
      ia += rule.weights[j] * va;
      ib += rule.weights[j] * vb;
    }
    acc += rule.weights[i] * ia * ib;
  }
  return acc;
}

/// Variant for integrands with known jumps or kinks. The inner conditional
/// expectations (given the shared Gaussian G) use composite rules split where
/// fa or fb is non-smooth; the outer integral over G is split around the
/// projected breakpoints with pieces graded to the conditional width, so the
/// result stays accurate as |correlation| approaches 1.
template <class FA, class FB>
double expect_bivariate(FA&& fa, FB&& fb, const BivariateGaussianParams& params,
                        std::span<const double> breakpoints_a,
                        std::span<const double> breakpoints_b, const PiecewiseOptions& opt = {}) {
  constexpr double kClamp = 1.0 - 1e-12;
  const double rho = std::clamp(params.correlation(), -kClamp, kClamp);
  const double shared = std::sqrt(std::abs(rho));
  const double own = std::sqrt(1.0 - std::abs(rho));
  const double sign = rho < 0.0 ? -1.0 : 1.0;

  std::vector<double> outer_cuts;
  if (shared > 0.0) {
    const double width = own / shared;
    auto add = [&](double b) {
      const double c = b / shared;
      outer_cuts.push_back(c);
      for (double k : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        outer_cuts.push_back(c - k * width);
        outer_cuts.push_back(c + k * width);
      }
    };
    for (double b : breakpoints_a) add(b);
    for (double b : breakpoints_b) add(sign * b);
  }
  const QuadratureRule outer = piecewise_normal_rule(outer_cuts, opt);

  std::vector<double> cuts;
  auto inner = [&](auto& f, std::span<const double> bps, double centre) {
    cuts.clear();
    for (double b : bps) cuts.push_back((b - centre) / own);
    const QuadratureRule r = piecewise_normal_rule(cuts, opt);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double v = f(centre + own * r.nodes[j]);
      if (!std::isfinite(v)) throw EvaluationError("expect_bivariate: non-finite integrand value");
      acc += r.weights[j] * v;
    }
    return acc;
  };
  double acc = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double xs = shared * outer.nodes[i];
    acc += outer.weights[i] * inner(fa, breakpoints_a, xs) * inner(fb, breakpoints_b, sign * xs);
  }
  return acc;
}

struct AbsPsiReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Checks E|psi(g)| psi'(g) <= (1/2) E|g| psi(g)^2 with the given rule.
template <class Psi, class DPsi>
AbsPsiReport verify_abs_psi_inequality(Psi&& psi, DPsi&& dpsi, const QuadratureRule& rule) {
  AbsPsiReport r;
  r.lhs = rule.expect([&](double x) { return std::abs(psi(x)) * dpsi(x); });
  r.rhs = 0.5 * rule.expect([&](double x) {
    const double v = psi(x);
    return std::abs(x) * v * v;
  });
  r.holds = r.lhs <= r.rhs + 1e-8 * (1.0 + std::abs(r.rhs));
  return r;
}

/// Same check, with a composite rule split at 0 and at the sign changes of psi
/// (where |psi| and |g| are not smooth).
inline AbsPsiReport verify_abs_psi_inequality(const RealFunction& psi, const RealFunction& dpsi) {
  const PiecewiseOptions opt;
  std::vector<double> cuts = sign_changes(psi, -opt.half_width, opt.half_width);
  cuts.push_back(0.0);
  return verify_abs_psi_inequality(psi, dpsi, piecewise_normal_rule(cuts, opt));
}

}  // namespace sklab
