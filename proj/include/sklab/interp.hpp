#pragma once

// Correlated disorder pairs g_t^l = sqrt(t) g + sqrt(1-t) g^l and the
// replica estimators built on them.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sklab/disorder.hpp"
#include "sklab/errors.hpp"
#include "sklab/parallel.hpp"
#include "sklab/random.hpp"
#include "sklab/sk.hpp"
#include "sklab/stats.hpp"

namespace sklab {

inline constexpr int kMaxPairSpins = 10;
inline constexpr double kEndpointClamp = 1e-6;

struct InterpState {
  DisorderSpec spec;
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<double> g_shared;
  std::vector<double> g_one;
  std::vector<double> g_two;
};

/// Replica `replica` of the family keyed by `seed`; three independent streams.
inline InterpState make_interp_state(const DisorderSpec& spec, int n, std::uint64_t seed,
                                     std::uint64_t replica = 0) {
  if (n < 1) throw DomainError("interp state: N must be positive");
  InterpState s{spec, n, seed, {}, {}, {}};
  const std::size_t count = static_cast<std::size_t>(n) * n;
  auto draw = [&](Stream which, std::vector<double>& out) {
    out.resize(count);
    NormalStream(stream_key(seed, {replica, static_cast<std::uint64_t>(which)})).fill(out);
  };
  draw(Stream::SharedGaussian, s.g_shared);
  draw(Stream::FirstCopy, s.g_one);
  draw(Stream::SecondCopy, s.g_two);
  return s;
}

struct CoupledSystem {
  double t = 0.0;
  std::vector<double> gauss_a;
  std::vector<double> gauss_b;
  SpinSystem a;
  SpinSystem b;
};

inline CoupledSystem realize_coupled(const InterpState& s, double t, double beta,
                                     double field = 0.0) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("realize_coupled: t must lie in [0,1]");
  const double st = std::sqrt(t);
  const double su = std::sqrt(1.0 - t);
  const std::size_t count = s.g_shared.size();
  std::vector<double> ga(count), gb(count), ha(count), hb(count);
  for (std::size_t k = 0; k < count; ++k) {
    ga[k] = st * s.g_shared[k] + su * s.g_one[k];
    gb[k] = st * s.g_shared[k] + su * s.g_two[k];
    ha[k] = s.spec(ga[k]);
    hb[k] = s.spec(gb[k]);
  }
  return CoupledSystem{t, std::move(ga), std::move(gb), SpinSystem(s.n, beta, std::move(ha), field),
                       SpinSystem(s.n, beta, std::move(hb), field)};
}

struct PhiEstimate {
  double t = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  int replicas = 0;
};

inline PhiEstimate to_estimate(double t, std::span<const double> samples) {
  const MeanEstimate m = estimate_mean(samples);
  return {t, m.mean, m.std_error, static_cast<int>(m.count)};
}

namespace detail {

inline void check_replicas(int replicas) {
  if (replicas < 2) throw DomainError("at least 2 replicas are required");
}

inline void check_exact(int n) {
  if (n > kMaxExactSpins) throw SizeError("exact enumeration capped at N = 20");
}

inline double clamp_open(double t) { return std::clamp(t, kEndpointClamp, 1.0 - kEndpointClamp); }

inline void require_derivative(const DisorderSpec& spec) {
  if (!spec.has_derivative()) {
    throw DerivativeUnavailable(std::string(spec.name()) + " disorder has no f'; use the w-based routes");
  }
}

/// N^{-2} sum_ij <s_i s_j>_A <s_i s_j>_B.
inline double overlap_second_moment(std::span<const double> ma, std::span<const double> mb, int n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < ma.size(); ++k) acc += ma[k] * mb[k];
  return acc / (static_cast<double>(n) * n);
}

}  // namespace detail

/// Per-replica F_A F_B on every grid point, sharing each replica's Gaussians
/// across the grid. Indexed [replica][t].
inline std::vector<std::vector<double>> phi_samples(const DisorderSpec& spec, int n, double beta,
                                                    std::span<const double> t_grid, int replicas,
                                                    std::uint64_t seed, double field = 0.0) {
  detail::check_replicas(replicas);
  detail::check_exact(n);
  const std::vector<double> grid(t_grid.begin(), t_grid.end());
  return parallel_map(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    const InterpState s = make_interp_state(spec, n, seed, r);
    std::vector<double> row;
    row.reserve(grid.size());
    for (double t : grid) {
      const CoupledSystem c = realize_coupled(s, t, beta, field);
      row.push_back(free_energy_exact(c.a).log_partition * free_energy_exact(c.b).log_partition);
    }
    return row;
  });
}

inline PhiEstimate phi_estimate(const DisorderSpec& spec, int n, double beta, double t,
                                int replicas, std::uint64_t seed, double field = 0.0) {
  const double grid[] = {t};
  const auto rows = phi_samples(spec, n, beta, grid, replicas, seed, field);
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(r[0]);
  return to_estimate(t, v);
}

/// Free energies F_N of the shared system (t = 1) per replica.
inline std::vector<double> free_energy_samples(const DisorderSpec& spec, int n, double beta,
                                               int replicas, std::uint64_t seed,
                                               double field = 0.0) {
  detail::check_replicas(replicas);
  detail::check_exact(n);
  return parallel_map(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    const InterpState s = make_interp_state(spec, n, seed, r);
    return free_energy_exact(realize_coupled(s, 1.0, beta, field).a).log_partition;
  });
}

/// Per replica, beta^2/N sum_ij f'(g^1_t) f'(g^2_t) <s_i s_j>_A <s_i s_j>_B;
/// indexed [replica][t]. Endpoints are clamped into (0, 1).
inline std::vector<std::vector<double>> phi_prime_samples(const DisorderSpec& spec, int n,
                                                          double beta,
                                                          std::span<const double> t_grid,
                                                          int replicas, std::uint64_t seed,
                                                          double field = 0.0) {
  detail::require_derivative(spec);
  detail::check_replicas(replicas);
  detail::check_exact(n);
  const std::vector<double> grid(t_grid.begin(), t_grid.end());
  return parallel_map(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    const InterpState s = make_interp_state(spec, n, seed, r);
    std::vector<double> row;
    for (double t : grid) {
      const CoupledSystem c = realize_coupled(s, detail::clamp_open(t), beta, field);
      const auto ma = *free_energy_exact(c.a, true).pair_expectations;
      const auto mb = *free_energy_exact(c.b, true).pair_expectations;
      double acc = 0.0;
      for (std::size_t k = 0; k < ma.size(); ++k) {
        acc += spec.derivative(c.gauss_a[k]) * spec.derivative(c.gauss_b[k]) * ma[k] * mb[k];
      }
      row.push_back(beta * beta / n * acc);
    }
    return row;
  });
}

inline PhiEstimate phi_prime_exact_small(const DisorderSpec& spec, int n, double beta, double t,
                                         int replicas, std::uint64_t seed, double field = 0.0) {
  const double grid[] = {t};
  const auto rows = phi_prime_samples(spec, n, beta, grid, replicas, seed, field);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[0]);
  return to_estimate(t, v);
}

/// Per replica E<R^2>_t under the product of the two Gibbs measures; [replica][t].
inline std::vector<std::vector<double>> overlap_samples(const DisorderSpec& spec, int n,
                                                        double beta,
                                                        std::span<const double> t_grid,
                                                        int replicas, std::uint64_t seed,
                                                        double field = 0.0) {
  detail::check_replicas(replicas);
  detail::check_exact(n);
  const std::vector<double> grid(t_grid.begin(), t_grid.end());
  return parallel_map(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    const InterpState s = make_interp_state(spec, n, seed, r);
    std::vector<double> row;
    for (double t : grid) {
      const CoupledSystem c = realize_coupled(s, t, beta, field);
      const auto ma = *free_energy_exact(c.a, true).pair_expectations;
      const auto mb = *free_energy_exact(c.b, true).pair_expectations;
      row.push_back(detail::overlap_second_moment(ma, mb, n));
    }
    return row;
  });
}

inline PhiEstimate coupled_overlap_moment(const DisorderSpec& spec, int n, double beta, double t,
                                          int replicas, std::uint64_t seed, double field = 0.0) {
  const double grid[] = {t};
  const auto rows = overlap_samples(spec, n, beta, grid, replicas, seed, field);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[0]);
  return to_estimate(t, v);
}

/// Two-system partition function resolved by Hamming distance k between
/// sigma and tau: log C_k = log sum_{d(sigma,tau)=k} p_A(sigma) p_B(tau).
/// Q(lambda) = log Z_A + log Z_B + log sum_k C_k exp(lambda beta^2 N R_k^2).
class OverlapResolvedPartition {
 public:
  OverlapResolvedPartition(const SpinSystem& a, const SpinSystem& b, int max_spins = kMaxPairSpins)
      : n_(a.size()), beta_(a.beta()) {
    if (b.size() != n_) throw DimensionMismatch("coupled systems differ in size");
    if (n_ > max_spins) {
      throw SizeError("pair enumeration capped at N = " + std::to_string(max_spins));
    }
    const std::vector<double> pa = gibbs_weights(enumerate_energies(a), &log_za_);
    const std::vector<double> pb = gibbs_weights(enumerate_energies(b), &log_zb_);
    std::vector<double> c(n_ + 1, 0.0);
    for (std::size_t s = 0; s < pa.size(); ++s) {
      const double w = pa[s];
      for (std::size_t u = 0; u < pb.size(); ++u) c[std::popcount(s ^ u)] += w * pb[u];
    }
    log_c_.resize(n_ + 1);
    for (int k = 0; k <= n_; ++k) {
      log_c_[k] = c[k] > 0.0 ? std::log(c[k]) : -std::numeric_limits<double>::infinity();
    }
  }

  int size() const { return n_; }
  double log_za() const { return log_za_; }
  double log_zb() const { return log_zb_; }
  std::span<const double> log_c() const { return log_c_; }

  double overlap_at(int k) const { return 1.0 - 2.0 * k / static_cast<double>(n_); }

  double q(double lambda) const {
    if (!(lambda >= 0.0)) throw DomainError("Q: lambda must be nonnegative");
    std::vector<double> x(n_ + 1);
    for (int k = 0; k <= n_; ++k) x[k] = log_c_[k] + tilt(lambda, k);
    return log_za_ + log_zb_ + detail::log_sum_exp(x);
  }

  /// d/dlambda Q = beta^2 N <R^2> under the tilted pair measure.
  double dq_dlambda(double lambda) const {
    std::vector<double> x(n_ + 1);
    for (int k = 0; k <= n_; ++k) x[k] = log_c_[k] + tilt(lambda, k);
    const double lz = detail::log_sum_exp(x);
    double acc = 0.0;
    for (int k = 0; k <= n_; ++k) {
      const double r = overlap_at(k);
      acc += std::exp(x[k] - lz) * r * r;
    }
    return beta_ * beta_ * n_ * acc;
  }

 private:
  double tilt(double lambda, int k) const {
    const double r = overlap_at(k);
    return lambda * beta_ * beta_ * n_ * r * r;
  }

  int n_;
  double beta_;
  double log_za_ = 0.0;
  double log_zb_ = 0.0;
  std::vector<double> log_c_;
};

/// Per replica Q over a lambda grid at fixed t; [replica][lambda].
inline std::vector<std::vector<double>> q_samples(const DisorderSpec& spec, int n, double beta,
                                                  double t, std::span<const double> lambda_grid,
                                                  int replicas, std::uint64_t seed,
                                                  double field = 0.0) {
  detail::check_replicas(replicas);
  if (n > kMaxPairSpins) throw SizeError("pair enumeration capped at N = 10");
  const std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  return parallel_map(static_cast<std::size_t>(replicas), [&](std::size_t r) {
    const InterpState s = make_interp_state(spec, n, seed, r);
    const CoupledSystem c = realize_coupled(s, t, beta, field);
    const OverlapResolvedPartition part(c.a, c.b);
    std::vector<double> row;
    for (double l : grid) row.push_back(part.q(l));
    return row;
  });
}

inline PhiEstimate coupled_free_energy_Q(const DisorderSpec& spec, int n, double beta, double t,
                                         double lambda, int replicas, std::uint64_t seed,
                                         double field = 0.0) {
  if (!(lambda >= 0.0)) throw DomainError("Q: lambda must be nonnegative");
  const double grid[] = {lambda};
  const auto rows = q_samples(spec, n, beta, t, grid, replicas, seed, field);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r[0]);
  return to_estimate(t, v);
}

struct HolderReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double std_error = 0.0;  // of lhs - rhs
  double exponent = 0.0;   // log t / log s
  bool holds_within_ci = false;
};

/// phi'(t) <= phi'(s)^a phi'(1-)^(1-a), a = log t / log s, on one common replica set.
inline HolderReport verify_holder_interpolation(const DisorderSpec& spec, int n, double beta,
                                                double s, double t, int replicas,
                                                std::uint64_t seed, double field = 0.0) {
  if (!(s > 0.0 && s < t && t < 1.0)) throw DomainError("holder: need 0 < s < t < 1");
  const double grid[] = {t, s, 1.0 - kEndpointClamp};
  const auto rows = phi_prime_samples(spec, n, beta, grid, replicas, seed, field);
  std::vector<double> at_t, at_s, at_1;
  for (const auto& r : rows) {
    at_t.push_back(r[0]);
    at_s.push_back(r[1]);
    at_1.push_back(r[2]);
  }
  HolderReport rep;
  rep.exponent = std::log(t) / std::log(s);
  const double a = rep.exponent;
  const double mt = estimate_mean(at_t).mean;
  const double ms = estimate_mean(at_s).mean;
  const double m1 = estimate_mean(at_1).mean;
  rep.lhs = mt;
  rep.rhs = (ms > 0.0 && m1 > 0.0) ? std::pow(ms, a) * std::pow(m1, 1.0 - a) : 0.0;
  // delta method on the common replica set
  std::vector<double> d(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double infl = (ms > 0.0 && m1 > 0.0) ? a * at_s[r] / ms + (1.0 - a) * at_1[r] / m1 : 0.0;
    d[r] = at_t[r] - rep.rhs * infl;
  }
  rep.std_error = estimate_mean(d).std_error;
  rep.holds_within_ci = rep.lhs <= rep.rhs + 3.0 * rep.std_error + 1e-12;
  return rep;
}

struct DifferenceEstimate {
  double t = 0.0;  // left grid point
  double value = 0.0;
  double std_error = 0.0;
};

struct MonotonicityReport {
  std::vector<PhiEstimate> phi;
  std::vector<DifferenceEstimate> first_differences;
  std::vector<DifferenceEstimate> second_differences;
  bool all_nonneg_within_ci = true;
};

/// First and second divided differences of phi over a sorted grid, replica-paired.
inline MonotonicityReport verify_complete_monotonicity(const DisorderSpec& spec, int n,
                                                       double beta, std::span<const double> t_grid,
                                                       int replicas, std::uint64_t seed,
                                                       double field = 0.0) {
  if (t_grid.size() < 4) throw DomainError("monotonicity check needs at least 4 grid points");
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw DomainError("t grid must be sorted");
  const auto rows = phi_samples(spec, n, beta, t_grid, replicas, seed, field);
  const std::size_t m = t_grid.size();
  MonotonicityReport rep;
  auto column = [&](auto&& value_of) {
    std::vector<double> v(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) v[r] = value_of(rows[r]);
    return estimate_mean(v);
  };
  for (std::size_t k = 0; k < m; ++k) {
    rep.phi.push_back(to_estimate(t_grid[k], [&] {
      std::vector<double> v;
      for (const auto& r : rows) v.push_back(r[k]);
      return v;
    }()));
  }
  auto flag = [&](const DifferenceEstimate& d) {
    if (d.value < -3.0 * d.std_error - 1e-12) rep.all_nonneg_within_ci = false;
  };
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double h = t_grid[k + 1] - t_grid[k];
    const MeanEstimate e = column([&](const auto& row) { return (row[k + 1] - row[k]) / h; });
    rep.first_differences.push_back({t_grid[k], e.mean, e.std_error});
    flag(rep.first_differences.back());
  }
  for (std::size_t k = 0; k + 2 < m; ++k) {
    const double h1 = t_grid[k + 1] - t_grid[k];
    const double h2 = t_grid[k + 2] - t_grid[k + 1];
    const MeanEstimate e = column([&](const auto& row) {
      const double d1 = (row[k + 1] - row[k]) / h1;
      const double d2 = (row[k + 2] - row[k + 1]) / h2;
      return 2.0 * (d2 - d1) / (h1 + h2);
    });
    rep.second_differences.push_back({t_grid[k], e.mean, e.std_error});
    flag(rep.second_differences.back());
  }
  return rep;
}

}  // namespace sklab
