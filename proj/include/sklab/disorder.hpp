#pragma once

// Disorder families h = f(g) with g standard normal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sklab/errors.hpp"
#include "sklab/gaussian.hpp"
#include "sklab/random.hpp"

namespace sklab {

enum class DisorderKind { Gaussian, Uniform, TwoPoint, Polynomial, Lipschitz, Truncated, Mollified };

inline std::string_view kind_name(DisorderKind k) {
  switch (k) {
    case DisorderKind::Gaussian: return "gaussian";
    case DisorderKind::Uniform: return "uniform";
    case DisorderKind::TwoPoint: return "two_point";
    case DisorderKind::Polynomial: return "polynomial";
    case DisorderKind::Lipschitz: return "lipschitz";
    case DisorderKind::Truncated: return "truncated";
    case DisorderKind::Mollified: return "mollified";
  }
  return "unknown";
}

struct DisorderMoments {
  double mean = 0.0;
  double variance = 1.0;
  double abs3 = 0.0;  // E|h|^3
};

/// h = a if g <= gamma, b otherwise; P(h = a) = p.
struct TwoPointShape {
  double a = -1.0;
  double b = 1.0;
  double p = 0.5;
  double gamma = 0.0;
};

inline constexpr double kDefaultTruncation = 8.0;
inline constexpr int kDefaultMollification = 16;

/// P(X <= gamma, Y > gamma) for standard bivariate normal (X, Y) with
/// correlation rho in [0, 1], by 1-D quadrature over the shared Gaussian:
/// E[Phi(u) (1 - Phi(u))], u = (gamma - sqrt(rho) G) / sqrt(1 - rho).
inline double orthant_omega(double gamma, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("orthant_omega: rho must lie in [0, 1]");
  if (rho >= 1.0 - 1e-15) return 0.0;
  const double own = std::sqrt(1.0 - rho);
  if (rho == 0.0) return std_normal_cdf(gamma) * std_normal_cdf(-gamma);
  const double shared = std::sqrt(rho);
  const double centre = gamma / shared;
  const double width = own / shared;
  std::vector<double> cuts{centre};
  for (double k : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    cuts.push_back(centre - k * width);
    cuts.push_back(centre + k * width);
  }
  return piecewise_normal_rule(cuts).expect([&](double g) {
    const double u = (gamma - shared * g) / own;
    return std_normal_cdf(u) * std_normal_cdf(-u);
  });
}

/// Omega(t) of the two-point family: P(g_t^1 <= gamma, g_t^2 > gamma), gamma = Phi^{-1}(p).
inline double omega_two_point(double p, double t) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("omega_two_point: p must lie in (0,1)");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("omega_two_point: t must lie in [0,1]");
  return orthant_omega(std_normal_quantile(p), t);
}

/// Standard bivariate normal density at (h, h).
inline double bivariate_density_diagonal(double h, double rho) {
  return std::exp(-h * h / (1.0 + rho)) / (2.0 * std::numbers::pi * std::sqrt(1.0 - rho * rho));
}

class DisorderSpec;
DisorderSpec make_gaussian();

/// A disorder law h = f(g) with moment metadata. Immutable; copies share state.
class DisorderSpec {
 public:
  struct Impl {
    DisorderKind kind = DisorderKind::Gaussian;
    RealFunction f;
    RealFunction df;             // empty when f' is unavailable
    std::vector<double> cuts;    // jumps/kinks of f or f', and sharp transitions
    std::optional<TwoPointShape> step;
    bool bounded = false;
    bool nondecreasing = false;
    // E f(sZ), E f(sZ1) f(sZ2) with corr(Z1, Z2) = rho, and d/drho of the latter.
    std::function<double(double)> mean_at;
    std::function<double(double, double)> bimoment;
    std::function<double(double, double)> bimoment_drho;
    DisorderMoments moments;
    std::optional<double> fprime2;
    std::optional<double> fprime3;
    std::shared_ptr<const Impl> base;
    double p = 0.0;
    double level = 0.0;
    int k = 0;
    std::vector<double> coeffs;
    std::string function_name;
  };

  DisorderSpec() : DisorderSpec(make_gaussian()) {}
  explicit DisorderSpec(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  DisorderKind kind() const { return impl_->kind; }
  std::string_view name() const { return kind_name(impl_->kind); }

  double operator()(double x) const { return impl_->f(x); }

  bool has_derivative() const { return static_cast<bool>(impl_->df); }
  double derivative(double x) const {
    if (!impl_->df) {
      throw DerivativeUnavailable(std::string(name()) + " disorder has no derivative");
    }
    return impl_->df(x);
  }

  const DisorderMoments& moments() const { return impl_->moments; }
  std::optional<double> fprime2() const { return impl_->fprime2; }
  std::optional<double> fprime3() const { return impl_->fprime3; }
  std::span<const double> cuts() const { return impl_->cuts; }
  const std::optional<TwoPointShape>& two_point() const { return impl_->step; }
  bool bounded() const { return impl_->bounded; }
  bool nondecreasing() const { return impl_->nondecreasing; }

  std::optional<DisorderSpec> base() const {
    if (!impl_->base) return std::nullopt;
    return DisorderSpec(impl_->base);
  }
  double p() const { return impl_->p; }
  double truncation_level() const { return impl_->level; }
  int mollification_k() const { return impl_->k; }
  const std::vector<double>& coefficients() const { return impl_->coeffs; }
  const std::string& function_name() const { return impl_->function_name; }

  double mean_at(double scale) const { return impl_->mean_at(scale); }
  double bimoment(double rho, double scale = 1.0) const { return impl_->bimoment(rho, scale); }
  bool has_bimoment_drho() const { return static_cast<bool>(impl_->bimoment_drho); }
  double bimoment_drho(double rho, double scale = 1.0) const {
    return impl_->bimoment_drho(rho, scale);
  }

  const Impl& impl() const { return *impl_; }
  std::shared_ptr<const Impl> shared_impl() const { return impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

namespace detail {

using Impl = DisorderSpec::Impl;

inline std::vector<double> scaled_cuts(std::span<const double> cuts, double s) {
  std::vector<double> out;
  out.reserve(cuts.size());
  for (double c : cuts) out.push_back(c / s);
  return out;
}

// Gauss-Hermite only for polynomials; everything else goes through the
// composite rule, which does not depend on analyticity in a wide strip.
inline double generic_mean_at(const RealFunction& f, std::span<const double> cuts, double s,
                              bool hermite) {
  auto fs = [&](double z) { return f(s * z); };
  if (hermite) return cached_gauss_hermite().expect(fs);
  return expect_normal(fs, scaled_cuts(cuts, s));
}

inline double generic_bimoment(const RealFunction& f, std::span<const double> cuts, double rho,
                               double s, bool hermite) {
  auto fs = [&](double z) { return f(s * z); };
  if (rho >= 1.0 - 1e-12) {
    auto sq = [&](double z) {
      const double v = f(s * z);
      return v * v;
    };
    if (hermite) return cached_gauss_hermite().expect(sq);
    return expect_normal(sq, scaled_cuts(cuts, s));
  }
  const BivariateGaussianParams params(std::clamp(rho, -1.0, 1.0));
  if (hermite) return expect_bivariate(fs, fs, params, cached_gauss_hermite());
  const std::vector<double> sc = scaled_cuts(cuts, s);
  return expect_bivariate(fs, fs, params, sc, sc);
}

/// Wires quadrature-based moment evaluators for f (and f' when present).
inline void attach_generic_moments(Impl& impl, bool hermite = false) {
  const RealFunction f = impl.f;
  const std::vector<double> cuts = impl.cuts;
  impl.mean_at = [f, cuts, hermite](double s) { return generic_mean_at(f, cuts, s, hermite); };
  impl.bimoment = [f, cuts, hermite](double rho, double s) {
    return generic_bimoment(f, cuts, rho, s, hermite);
  };
  if (impl.df) {
    const RealFunction df = impl.df;
    impl.bimoment_drho = [df, cuts, hermite](double rho, double s) {
      return s * s * generic_bimoment(df, cuts, rho, s, hermite);
    };
  } else {
    impl.bimoment_drho = nullptr;
  }
}

/// Replaces f by (f - E f(g)) / sd(f(g)) and rewires the moment evaluators.
inline void standardize(Impl& impl, double min_variance = 1e-12) {
  const double m = impl.mean_at(1.0);
  const double var = impl.bimoment(1.0, 1.0) - m * m;
  if (!(var > min_variance)) {
    throw DegenerateError("variance " + std::to_string(var) + " below threshold; cannot standardize");
  }
  const double sd = std::sqrt(var);
  const RealFunction f = impl.f;
  impl.f = [f, m, sd](double x) { return (f(x) - m) / sd; };
  if (impl.df) {
    const RealFunction df = impl.df;
    impl.df = [df, sd](double x) { return df(x) / sd; };
  }
  const auto mean_at = impl.mean_at;
  const auto bimoment = impl.bimoment;
  impl.mean_at = [mean_at, m, sd](double s) { return (mean_at(s) - m) / sd; };
  impl.bimoment = [mean_at, bimoment, m, sd](double rho, double s) {
    return (bimoment(rho, s) - 2.0 * m * mean_at(s) + m * m) / (sd * sd);
  };
  if (impl.bimoment_drho) {
    const auto drho = impl.bimoment_drho;
    impl.bimoment_drho = [drho, sd](double rho, double s) { return drho(rho, s) / (sd * sd); };
  }
}

/// Quadrature moments of the final f; enforces the standardization contract.
inline void finalize(Impl& impl) {
  const RealFunction& f = impl.f;
  const PiecewiseOptions opt;
  const QuadratureRule rule = piecewise_normal_rule(impl.cuts, opt);
  const double mean = rule.expect(f);
  const double second = rule.expect([&](double x) {
    const double v = f(x);
    return v * v;
  });
  std::vector<double> abs_cuts = impl.cuts;
  for (double z : sign_changes(f, -opt.half_width, opt.half_width)) abs_cuts.push_back(z);
  const double abs3 = expect_normal(
      [&](double x) {
        const double v = std::abs(f(x));
        return v * v * v;
      },
      abs_cuts, opt);
  impl.moments = {mean, second - mean * mean, abs3};
  if (std::abs(mean) > 1e-8 || std::abs(second - mean * mean - 1.0) > 1e-8) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "standardization failed: mean %.3g, variance %.12g", mean,
                  second - mean * mean);
    throw DegenerateError(buf);
  }
  if (!(std::isfinite(abs3) && abs3 >= 1.0 - 1e-8)) {
    throw std::logic_error("E|h|^3 = " + std::to_string(abs3) + " violates power-mean bound");
  }
  if (impl.df) {
    const RealFunction& df = impl.df;
    impl.fprime2 = rule.expect([&](double x) {
      const double v = df(x);
      return v * v;
    });
    impl.fprime3 = rule.expect([&](double x) {
      const double v = std::abs(df(x));
      return v * v * v;
    });
  } else {
    impl.fprime2.reset();
    impl.fprime3.reset();
  }
}

inline DisorderSpec wrap(Impl impl) {
  return DisorderSpec(std::make_shared<const Impl>(std::move(impl)));
}

inline void attach_two_point_moments(Impl& impl, const TwoPointShape& tp) {
  const double a = tp.a;
  const double b = tp.b;
  const double gamma = tp.gamma;
  impl.mean_at = [a, b, gamma](double s) {
    const double pp = std_normal_cdf(gamma / s);
    return a * pp + b * (1.0 - pp);
  };
  impl.bimoment = [a, b, gamma](double rho, double s) {
    const double g = gamma / s;
    const double pp = std_normal_cdf(g);
    const double omega = orthant_omega(g, std::clamp(rho, 0.0, 1.0));
    return a * a * pp + b * b * (1.0 - pp) - (a - b) * (a - b) * omega;
  };
  impl.bimoment_drho = [a, b, gamma](double rho, double s) {
    const double g = gamma / s;
    return (a - b) * (a - b) * bivariate_density_diagonal(g, rho);
  };
}

}  // namespace detail

inline DisorderSpec make_gaussian() {
  detail::Impl impl;
  impl.kind = DisorderKind::Gaussian;
  impl.f = [](double x) { return x; };
  impl.df = [](double) { return 1.0; };
  impl.nondecreasing = true;
  impl.mean_at = [](double) { return 0.0; };
  impl.bimoment = [](double rho, double s) { return s * s * rho; };
  impl.bimoment_drho = [](double, double s) { return s * s; };
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// Uniform on [-sqrt3, sqrt3]: f(x) = sqrt3 (2 Phi(x) - 1).
inline DisorderSpec make_uniform() {
  detail::Impl impl;
  impl.kind = DisorderKind::Uniform;
  impl.f = [](double x) { return std::numbers::sqrt3 * (2.0 * std_normal_cdf(x) - 1.0); };
  impl.df = [](double x) { return 2.0 * std::numbers::sqrt3 * std_normal_pdf(x); };
  impl.bounded = true;
  impl.nondecreasing = true;
  // Cov(Phi(sZ1), Phi(sZ2)) = arcsin(rho s^2 / (1 + s^2)) / (2 pi)
  impl.mean_at = [](double) { return 0.0; };
  impl.bimoment = [](double rho, double s) {
    const double r = rho * s * s / (1.0 + s * s);
    return 6.0 / std::numbers::pi * std::asin(r);
  };
  impl.bimoment_drho = [](double rho, double s) {
    const double c = s * s / (1.0 + s * s);
    const double r = rho * c;
    return 6.0 / std::numbers::pi * c / std::sqrt(1.0 - r * r);
  };
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// Standardized two-point law with P(h = a) = p, a < 0 < b.
inline DisorderSpec make_two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError("p", "p must lie in (0,1)");
  TwoPointShape tp;
  tp.p = p;
  tp.a = -std::sqrt((1.0 - p) / p);
  tp.b = std::sqrt(p / (1.0 - p));
  tp.gamma = std_normal_quantile(p);
  detail::Impl impl;
  impl.kind = DisorderKind::TwoPoint;
  impl.p = p;
  impl.f = [tp](double x) { return x <= tp.gamma ? tp.a : tp.b; };
  impl.cuts = {tp.gamma};
  impl.step = tp;
  impl.bounded = true;
  impl.nondecreasing = true;
  detail::attach_two_point_moments(impl, tp);
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

inline DisorderSpec make_rademacher() { return make_two_point(0.5); }

/// Standardized polynomial transform sum_k coeffs[k] x^k.
inline DisorderSpec make_polynomial(std::vector<double> coeffs) {
  while (!coeffs.empty() && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.size() < 2) throw DegenerateError("polynomial transform must be non-constant");
  if (coeffs.size() > 16) throw ValidationError("coeffs", "degree above 15 is not supported");
  detail::Impl impl;
  impl.kind = DisorderKind::Polynomial;
  impl.coeffs = coeffs;
  impl.f = [coeffs](double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
  };
  impl.df = [coeffs](double x) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size() - 1; k >= 1; --k) acc = acc * x + k * coeffs[k];
    return acc;
  };
  impl.nondecreasing = true;
  for (int i = 0; i <= 2400; ++i) {
    if (impl.df(-12.0 + i * 0.01) < 0.0) {
      impl.nondecreasing = false;
      break;
    }
  }
  detail::attach_generic_moments(impl, true);
  detail::standardize(impl);
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// Standardized transform by a user-supplied Lipschitz function.
inline DisorderSpec make_lipschitz(std::string name, RealFunction f, RealFunction df = nullptr,
                                   bool bounded = false, bool nondecreasing = false) {
  detail::Impl impl;
  impl.kind = DisorderKind::Lipschitz;
  impl.function_name = std::move(name);
  impl.f = std::move(f);
  impl.df = std::move(df);
  impl.bounded = bounded;
  impl.nondecreasing = nondecreasing;
  detail::attach_generic_moments(impl);
  detail::standardize(impl);
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// Named Lipschitz transforms understood by the config grammar.
inline DisorderSpec make_lipschitz_named(const std::string& name) {
  if (name == "tanh") {
    return make_lipschitz(
        name, [](double x) { return std::tanh(x); },
        [](double x) {
          const double c = std::cosh(x);
          return 1.0 / (c * c);
        },
        true, true);
  }
  if (name == "arctan") {
    return make_lipschitz(
        name, [](double x) { return std::atan(x); }, [](double x) { return 1.0 / (1.0 + x * x); },
        true, true);
  }
  if (name == "softsign") {
    return make_lipschitz(
        name, [](double x) { return x / (1.0 + std::abs(x)); },
        [](double x) {
          const double d = 1.0 + std::abs(x);
          return 1.0 / (d * d);
        },
        true, true);
  }
  throw ValidationError("function", "unknown Lipschitz function '" + name + "'");
}

/// Standardized truncation (f_n - E f_n(g)) / sd(f_n(g)), f_n = clamp(f, -n, n).
inline DisorderSpec truncate(const DisorderSpec& base, double n) {
  if (!(n > 0.0)) throw ValidationError("n", "truncation level must be positive");
  detail::Impl impl;
  impl.kind = DisorderKind::Truncated;
  impl.base = base.shared_impl();
  impl.level = n;
  impl.bounded = true;
  impl.nondecreasing = base.nondecreasing();

  if (const auto& tp = base.two_point()) {
    // Clamping a two-point law keeps two atoms with the same p, so the
    // standardized truncation is the same law.
    const double lo = std::max(tp->a, -n);
    const double hi = std::min(tp->b, n);
    if (!(hi > lo)) throw DegenerateError("truncated variance vanishes");
    impl.f = [tp = *tp](double x) { return x <= tp.gamma ? tp.a : tp.b; };
    impl.cuts = {tp->gamma};
    impl.step = tp;
    detail::attach_two_point_moments(impl, *tp);
    detail::finalize(impl);
    return detail::wrap(std::move(impl));
  }

  const RealFunction bf = base.impl().f;
  impl.f = [bf, n](double x) { return std::clamp(bf(x), -n, n); };
  if (base.has_derivative()) {
    const RealFunction bdf = base.impl().df;
    impl.df = [bf, bdf, n](double x) { return std::abs(bf(x)) < n ? bdf(x) : 0.0; };
  }
  impl.cuts.assign(base.cuts().begin(), base.cuts().end());
  const PiecewiseOptions opt;
  for (double level : {n, -n}) {
    const RealFunction shifted = [bf, level](double x) { return bf(x) - level; };
    for (double z : sign_changes(shifted, -opt.half_width, opt.half_width)) impl.cuts.push_back(z);
  }
  std::sort(impl.cuts.begin(), impl.cuts.end());
  detail::attach_generic_moments(impl);
  detail::standardize(impl);
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// Gaussian mollification x -> E base(x + g / sqrt(k)), re-standardized.
/// Unbounded bases are truncated at the default level first.
inline DisorderSpec mollify(const DisorderSpec& base_in, int k) {
  if (k < 1) throw ValidationError("k", "mollification index must be a positive integer");
  const DisorderSpec base = base_in.bounded() ? base_in : truncate(base_in, kDefaultTruncation);
  const double root_k = std::sqrt(static_cast<double>(k));
  const double inv_k = 1.0 / k;

  detail::Impl impl;
  impl.kind = DisorderKind::Mollified;
  impl.base = base.shared_impl();
  impl.k = k;
  impl.bounded = true;
  impl.nondecreasing = base.nondecreasing();

  const RealFunction bf = base.impl().f;
  const std::vector<double> bcuts(base.cuts().begin(), base.cuts().end());
  auto rule_at = [bcuts, root_k](double x) {
    std::vector<double> c;
    c.reserve(bcuts.size());
    for (double b : bcuts) c.push_back(root_k * (b - x));
    return piecewise_normal_rule(c);
  };
  impl.f = [bf, rule_at, root_k](double x) {
    return rule_at(x).expect([&](double u) { return bf(x + u / root_k); });
  };
  // Stein: d/dx E b(x + u/sqrt k) = sqrt(k) E[u b(x + u/sqrt k)]
  impl.df = [bf, rule_at, root_k](double x) {
    return root_k * rule_at(x).expect([&](double u) { return u * bf(x + u / root_k); });
  };
  for (double b : bcuts) {
    for (double off : {0.0, -0.5, 0.5, -1.0, 1.0, -2.0, 2.0}) impl.cuts.push_back(b + off / root_k);
  }
  std::sort(impl.cuts.begin(), impl.cuts.end());

  // x + U/sqrt(k) with x = sZ has scale sqrt(s^2 + 1/k); the pair's
  // correlation shrinks to rho s^2 / (s^2 + 1/k).
  impl.mean_at = [base, inv_k](double s) { return base.mean_at(std::sqrt(s * s + inv_k)); };
  impl.bimoment = [base, inv_k](double rho, double s) {
    const double s2 = s * s + inv_k;
    return base.bimoment(rho * s * s / s2, std::sqrt(s2));
  };
  if (base.has_bimoment_drho()) {
    impl.bimoment_drho = [base, inv_k](double rho, double s) {
      const double s2 = s * s + inv_k;
      return base.bimoment_drho(rho * s * s / s2, std::sqrt(s2)) * s * s / s2;
    };
  }
  detail::standardize(impl);
  detail::finalize(impl);
  return detail::wrap(std::move(impl));
}

/// w(t) = E f(g_t^1) f(g_t^2).
inline double w_of_t(const DisorderSpec& spec, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("w_of_t: t must lie in [0,1]");
  return spec.bimoment(t, 1.0);
}

struct WPrimeOptions {
  bool step_closed_form = true;  // d/dt of the two-point closed form
  double fd_step = 1e-5;
};

/// w'(t) = E f'(g_t^1) f'(g_t^2); closed forms where available, otherwise
/// quadrature of f', otherwise central differences of w.
inline double wprime_of_t(const DisorderSpec& spec, double t, const WPrimeOptions& opt = {}) {
  if (!(t >= 0.0 && t < 1.0)) throw DomainError("wprime_of_t: t must lie in [0,1)");
  if (spec.two_point() && !opt.step_closed_form) {
    throw DerivativeUnavailable("two-point disorder: f' undefined and closed-form path disabled");
  }
  if (spec.has_bimoment_drho()) return spec.bimoment_drho(t, 1.0);
  const double h = opt.fd_step;
  auto w = [&](double s) { return w_of_t(spec, s); };
  if (t < h) return (-3.0 * w(t) + 4.0 * w(t + h) - w(t + 2.0 * h)) / (2.0 * h);
  if (t > 1.0 - h) return (3.0 * w(t) - 4.0 * w(t - h) + w(t - 2.0 * h)) / (2.0 * h);
  return (w(t + h) - w(t - h)) / (2.0 * h);
}

struct CovarianceProfile {
  std::vector<double> t_grid;
  std::vector<double> w_values;
  std::vector<double> wprime_values;  // NaN at t = 1
};

inline CovarianceProfile covariance_profile(const DisorderSpec& spec, std::vector<double> grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("t grid must be sorted");
  CovarianceProfile prof;
  prof.t_grid = std::move(grid);
  for (double t : prof.t_grid) {
    prof.w_values.push_back(w_of_t(spec, t));
    prof.wprime_values.push_back(t < 1.0 ? wprime_of_t(spec, t)
                                         : std::numeric_limits<double>::quiet_NaN());
  }
  return prof;
}

/// N x N couplings h_ij = f(g_ij) together with the Gaussians behind them.
struct DisorderMatrix {
  int n = 0;
  std::vector<double> gaussians;  // row-major
  std::vector<double> couplings;  // row-major

  double gaussian(int i, int j) const { return gaussians[static_cast<std::size_t>(i) * n + j]; }
  double coupling(int i, int j) const { return couplings[static_cast<std::size_t>(i) * n + j]; }
};

/// Deterministic in (spec, N, seed); the matrix is not symmetrized.
inline DisorderMatrix sample_couplings(const DisorderSpec& spec, int n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_couplings: N must be positive");
  DisorderMatrix m;
  m.n = n;
  const std::size_t count = static_cast<std::size_t>(n) * n;
  m.gaussians.resize(count);
  NormalStream(stream_key(seed, {static_cast<std::uint64_t>(Stream::Couplings)}))
      .fill(m.gaussians);
  m.couplings.resize(count);
  for (std::size_t i = 0; i < count; ++i) m.couplings[i] = spec(m.gaussians[i]);
  return m;
}

}  // namespace sklab
