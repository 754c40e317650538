#pragma once

// Closed-form bound quantities and measured-vs-bound ratio diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "sklab/disorder.hpp"
#include "sklab/errors.hpp"
#include "sklab/interp.hpp"
#include "sklab/stats.hpp"

namespace sklab {

struct BoundInputs {
  int n = 2;
  double beta = 1.0;
  double abs3 = 1.0;
  std::optional<double> fprime2;
  std::optional<double> fprime3;
  double c_const = 1.0;
  double K_const = 1.0;

  void validate() const {
    if (n < 2) throw DomainError("bound inputs: N must be at least 2");
    if (!(beta > 0.0)) throw DomainError("bound inputs: beta must be positive");
    if (!(std::isfinite(abs3) && abs3 >= 1.0 - 1e-8)) {
      throw DomainError("bound inputs: E|h|^3 must be finite and at least 1");
    }
    if (!(c_const > 0.0)) throw DomainError("bound inputs: c must be positive");
    if (!(K_const > 0.0)) throw DomainError("bound inputs: K must be positive");
  }

  static BoundInputs from_spec(const DisorderSpec& spec, int n, double beta, double c = 1.0,
                               double k = 1.0) {
    return {n, beta, spec.moments().abs3, spec.fprime2(), spec.fprime3(), c, k};
  }
};

inline double r0_of_t(double abs3, double t) {
  if (!(t < 1.0)) throw DomainError("r0_of_t: t must be below 1");
  return (std::cbrt(2.0) * abs3 + 1.0) / (1.0 - t);
}

/// 4 beta^2 log(1/(1-t)) < 1.
inline bool r1_admissible(double beta, double t) {
  return t < 1.0 && 4.0 * beta * beta * std::log(1.0 / (1.0 - t)) < 1.0;
}

inline double r1_of_t(double abs3, double beta, double t, double K = 1.0) {
  if (!r1_admissible(beta, t)) {
    throw AdmissibilityError("r1_of_t: requires 4 beta^2 log(1/(1-t)) < 1");
  }
  const double slack = 1.0 - 4.0 * beta * beta * std::log(1.0 / (1.0 - t));
  return K * (std::log(std::numbers::sqrt2 / std::sqrt(slack)) + (abs3 + 1.0) / (1.0 - t) + abs3);
}

inline double d_of_t(double beta, double abs3, double t) {
  return 16.0 * beta * beta * beta * r0_of_t(abs3, t);
}

/// Bound on E<R^2>_t with the explicit constants.
inline double overlap_bound_explicit(double abs3, double beta, double t, int n) {
  if (!r1_admissible(beta, t)) {
    throw AdmissibilityError("overlap bound: requires 4 beta^2 log(1/(1-t)) < 1");
  }
  const double slack = 1.0 - 4.0 * beta * beta * std::log(1.0 / (1.0 - t));
  const double b3 = beta * beta * beta;
  const double rn = std::sqrt(static_cast<double>(n));
  return 4.0 / n * std::log(std::numbers::sqrt2 / std::sqrt(slack)) +
         64.0 * b3 * (std::cbrt(2.0) * abs3 + 1.0) / (rn * (1.0 - t)) + 48.0 * b3 * abs3 / rn;
}

/// t-independent replacement for R_0 when f' has a third moment.
inline double c0_const(double abs3, double fprime3, double fprime2) {
  return std::cbrt(abs3) * std::pow(fprime3, 2.0 / 3.0) + fprime2;
}

inline double c1_of_t(double abs3, double fprime3, double fprime2, double beta, double t) {
  if (!r1_admissible(beta, t)) throw AdmissibilityError("c1_of_t: requires 4 beta^2 log(1/(1-t)) < 1");
  const double slack = 1.0 - 4.0 * beta * beta * std::log(1.0 / (1.0 - t));
  const double b3 = beta * beta * beta;
  const double d0 = 16.0 * b3 * c0_const(abs3, fprime3, fprime2);
  return 4.0 * std::log(std::numbers::sqrt2 / std::sqrt(slack)) + 48.0 * b3 * abs3 + 4.0 * d0;
}

/// r_N = (log N)^{-c / log N}, clamped to 1 when log N < 1.
inline double thm1_r_n(double n, double c) {
  const double ln = std::log(n);
  return std::min(1.0, std::pow(ln, -c / ln));
}

namespace detail {

// Real-valued N so the formulas can be probed off the integers.
inline double thm1_value(double n, const BoundInputs& in, const RealFunction& w) {
  const double ln = std::log(n);
  return in.K_const * (in.abs3 + 1.0) * n * (1.0 - w(thm1_r_n(n, in.c_const)) + 1.0 / ln);
}

inline double thm2_value(double n, const BoundInputs& in) {
  if (!in.fprime3) throw MissingMomentError("thm2_rhs: E|f'(g)|^3 is unavailable");
  const double f3 = *in.fprime3;
  return in.K_const * (1.0 + f3 * f3) * n / std::log(n);
}

}  // namespace detail

inline double thm1_rhs(const BoundInputs& in, const RealFunction& w) {
  in.validate();
  return detail::thm1_value(in.n, in, w);
}

inline double thm1_rhs(const BoundInputs& in, const DisorderSpec& spec) {
  return thm1_rhs(in, [&](double t) { return w_of_t(spec, t); });
}

inline double thm2_rhs(const BoundInputs& in) {
  in.validate();
  return detail::thm2_value(in.n, in);
}

struct Remark1Report {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// 1 - w(t) <= (1 - t) E f'(g)^2.
inline Remark1Report remark1_bound(const DisorderSpec& spec, double t) {
  if (!spec.fprime2()) throw MissingMomentError("remark1_bound: E f'(g)^2 is unavailable");
  Remark1Report r;
  r.lhs = 1.0 - w_of_t(spec, t);
  r.rhs = (1.0 - t) * *spec.fprime2();
  r.holds = r.lhs <= r.rhs + 1e-6;
  return r;
}

struct BoundReport {
  int n = 0;
  double measured_var = 0.0;
  double var_std_error = 0.0;
  double rhs_thm1 = 0.0;
  std::optional<double> rhs_thm2;
  double ratio_thm1 = 0.0;
  std::optional<double> ratio_thm2;
};

inline BoundReport bound_report(const DisorderSpec& spec, double beta, int n,
                                const VarianceEstimate& var, double c_const = 1.0,
                                double K_const = 1.0) {
  const BoundInputs in = BoundInputs::from_spec(spec, n, beta, c_const, K_const);
  BoundReport rep;
  rep.n = n;
  rep.measured_var = var.var;
  rep.var_std_error = var.std_error;
  rep.rhs_thm1 = thm1_rhs(in, spec);
  rep.ratio_thm1 = var.var / rep.rhs_thm1;
  if (in.fprime3) {
    rep.rhs_thm2 = thm2_rhs(in);
    rep.ratio_thm2 = var.var / *rep.rhs_thm2;
  }
  return rep;
}

/// Measured Var(F_N) against both right-hand sides with the given constants.
inline std::vector<BoundReport> bound_ratio_study(const DisorderSpec& spec, double beta,
                                                  std::span<const int> n_list, double c_const,
                                                  int replicas, std::uint64_t seed,
                                                  double field = 0.0, double K_const = 1.0) {
  std::vector<BoundReport> out;
  for (int n : n_list) {
    const std::vector<double> f = free_energy_samples(spec, n, beta, replicas, seed, field);
    out.push_back(bound_report(spec, beta, n, estimate_variance_jackknife(f), c_const, K_const));
  }
  return out;
}

}  // namespace sklab
