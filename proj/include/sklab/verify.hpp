#pragma once

// Built-in invariant suite behind `sklab verify`.

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sklab/bounds.hpp"
#include "sklab/disorder.hpp"
#include "sklab/experiments.hpp"
#include "sklab/gaussian.hpp"
#include "sklab/interp.hpp"
#include "sklab/sk.hpp"

namespace sklab {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline double naive_log_partition(const SpinSystem& sys) {
  const int n = sys.size();
  std::vector<double> e(std::size_t{1} << n);
  for (std::size_t c = 0; c < e.size(); ++c) e[c] = energy(sys, SpinConfig(c, n));
  return log_sum_exp(e);
}

inline CheckResult check(std::string name, const std::function<std::string()>& body) {
  try {
    std::string failure = body();
    return {std::move(name), failure.empty(), failure.empty() ? "ok" : failure};
  } catch (const std::exception& ex) {
    return {std::move(name), false, std::string("exception: ") + ex.what()};
  }
}

}  // namespace detail

inline std::vector<CheckResult> run_verify_suite(bool fast) {
  std::vector<CheckResult> out;
  const int replicas = fast ? 1000 : 4000;

  out.push_back(detail::check("quadrature: Gauss-Hermite weights and moments", [] {
    const QuadratureRule& r = cached_gauss_hermite();
    double wsum = 0.0;
    for (double w : r.weights) wsum += w;
    const double m4 = r.expect([](double x) { return x * x * x * x; });
    if (std::abs(wsum - 1.0) > 1e-12 || std::abs(m4 - 3.0) > 1e-10) return std::string("moment mismatch");
    return std::string();
  }));

  out.push_back(detail::check("disorder: standardization of built-in families", [] {
    for (const DisorderSpec& s : {make_gaussian(), make_uniform(), make_two_point(0.2), make_rademacher(),
                                  make_lipschitz_named("tanh"), mollify(make_rademacher(), 16)}) {
      if (std::abs(s.moments().mean) > 1e-8 || std::abs(s.moments().variance - 1.0) > 1e-8) {
        return std::string(s.name()) + " not standardized";
      }
    }
    return std::string();
  }));

  out.push_back(detail::check("disorder: closed-form w(t) against quadrature", [] {
    const DisorderSpec u = make_uniform();
    const DisorderSpec rad = make_rademacher();
    for (double t : {0.0, 0.3, 0.6, 0.9, 0.99}) {
      const double quad_u = expect_bivariate(u.impl().f, u.impl().f, BivariateGaussianParams(t),
                                             cached_gauss_hermite(96));
      if (std::abs(w_of_t(u, t) - quad_u) > 1e-8) return "uniform at t=" + format_double(t);
      if (std::abs(w_of_t(rad, t) - 2.0 / std::numbers::pi * std::asin(t)) > 1e-8) {
        return "rademacher at t=" + format_double(t);
      }
    }
    return std::string();
  }));

  out.push_back(detail::check("sk: Gray-code enumeration against naive summation", [] {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 2 + trial;
      const SpinSystem sys(sample_couplings(make_gaussian(), n, 100 + trial), 0.8, 0.1 * trial);
      if (std::abs(free_energy_exact(sys).log_partition - detail::naive_log_partition(sys)) > 1e-9) {
        return "mismatch at N=" + std::to_string(n);
      }
    }
    return std::string();
  }));

  out.push_back(detail::check("gaussian: |psi| inequality equality case", [] {
    const AbsPsiReport r = verify_abs_psi_inequality([](double x) { return x; }, [](double) { return 1.0; });
    if (std::abs(r.lhs - r.rhs) > 1e-9) return std::string("lhs != rhs");
    return std::string();
  }));

  out.push_back(detail::check("bounds: remark-1 inequality", [] {
    for (const DisorderSpec& s : {make_gaussian(), make_uniform()}) {
      for (int i = 0; i <= 10; ++i) {
        if (!remark1_bound(s, i / 10.0).holds) return std::string(s.name()) + " violates";
      }
    }
    return std::string();
  }));

  out.push_back(detail::check("interp: Q convexity and decoupling", [] {
    const double grid[] = {0.0, 0.1, 0.2, 0.3, 0.4};
    for (std::size_t r = 0; r < 20; ++r) {
      const QReplica q = q_replica(make_gaussian(), 6, 0.7, 0.0, 0.3, grid, std::nullopt, 7, r);
      if (q.min_second_difference < -1e-9) return std::string("not convex");
      if (q.decoupling_error > 1e-10) return std::string("lambda = 0 does not decouple");
      if (q.overlap_dual_gap > 1e-9) return std::string("d/dlambda Q disagrees with overlap moment");
    }
    return std::string();
  }));

  out.push_back(detail::check("interp: phi(1) - phi(0) against variance", [replicas] {
    const double grid[] = {0.0, 1.0};
    const DisorderSpec g = make_gaussian();
    const auto rows = phi_samples(g, 5, 1.0, grid, replicas, 11);
    std::vector<double> d;
    for (const auto& r : rows) d.push_back(r[1] - r[0]);
    const MeanEstimate gap = estimate_mean(d);
    const VarianceEstimate v = estimate_variance_jackknife(free_energy_samples(g, 5, 1.0, replicas, 11));
    const double sigma = std::hypot(gap.std_error, v.std_error);
    if (std::abs(gap.mean - v.var) > 3.0 * sigma) return std::string("identity violated beyond 3 sigma");
    return std::string();
  }));

  out.push_back(detail::check("experiments: CSV round trip", [] {
    ExperimentConfig c;
    c.n_list = {3, 4};
    c.replicas = 20;
    const auto rows = run_study(c);
    const std::string csv = to_csv(rows);
    if (to_csv(parse_csv(csv)) != csv) return std::string("round trip changed the text");
    return std::string();
  }));

  return out;
}

}  // namespace sklab
