#pragma once

// SK Hamiltonian over all ordered pairs (i, j), diagonal included:
//   -H(sigma) = beta / sqrt(N) * sum_{i,j} h_ij s_i s_j + r * sum_i s_i

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sklab/disorder.hpp"
#include "sklab/errors.hpp"
#include "sklab/random.hpp"

namespace sklab {

inline constexpr int kMaxExactSpins = 20;
inline constexpr int kMaxConfigBits = 64;

/// Spin configuration; bit i set means s_i = -1.
class SpinConfig {
 public:
  SpinConfig() = default;
  SpinConfig(std::uint64_t bits, int n) : bits_(bits & mask(n)), n_(n) {
    if (n < 1 || n > kMaxConfigBits) throw SizeError("SpinConfig: N must lie in [1, 64]");
  }

  static SpinConfig from_spins(std::span<const int> spins) {
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < spins.size(); ++i) {
      if (spins[i] == -1) {
        bits |= std::uint64_t{1} << i;
      } else if (spins[i] != 1) {
        throw DomainError("spins must be +1 or -1");
      }
    }
    return {bits, static_cast<int>(spins.size())};
  }

  int size() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  int spin(int i) const { return (bits_ >> i) & 1U ? -1 : 1; }
  SpinConfig flipped(int i) const { return {bits_ ^ (std::uint64_t{1} << i), n_}; }
  SpinConfig complement() const { return {~bits_, n_}; }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

 private:
  static std::uint64_t mask(int n) {
    return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  }

  std::uint64_t bits_ = 0;
  int n_ = 1;
};

class SpinSystem {
 public:
  SpinSystem(int n, double beta, std::vector<double> couplings, double field = 0.0)
      : n_(n), beta_(beta), field_(field), h_(std::move(couplings)) {
    if (n < 1) throw DomainError("SpinSystem: N must be positive");
    if (n > kMaxConfigBits) throw SizeError("SpinSystem: N above 64 is not supported");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("SpinSystem: beta must be positive");
    if (!std::isfinite(field)) throw DomainError("SpinSystem: field must be finite");
    if (h_.size() != static_cast<std::size_t>(n) * n) {
      throw DimensionMismatch("SpinSystem: couplings must be N x N");
    }
    for (double v : h_) {
      if (!std::isfinite(v)) throw DomainError("SpinSystem: couplings must be finite");
    }
  }

  SpinSystem(const DisorderMatrix& m, double beta, double field = 0.0)
      : SpinSystem(m.n, beta, m.couplings, field) {}

  int size() const { return n_; }
  double beta() const { return beta_; }
  double field() const { return field_; }
  double coupling(int i, int j) const { return h_[static_cast<std::size_t>(i) * n_ + j]; }
  std::span<const double> couplings() const { return h_; }
  double scale() const { return beta_ / std::sqrt(static_cast<double>(n_)); }

 private:
  int n_;
  double beta_;
  double field_;
  std::vector<double> h_;
};

/// Exponent of the Gibbs weight, -H(sigma) + r sum sigma.
inline double energy(const SpinSystem& sys, const SpinConfig& c) {
  const int n = sys.size();
  if (c.size() != n) throw DimensionMismatch("energy: config size differs from system size");
  double acc = 0.0;
  double mag = 0.0;
  for (int i = 0; i < n; ++i) {
    const int si = c.spin(i);
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += sys.coupling(i, j) * c.spin(j);
    acc += si * row;
    mag += si;
  }
  return sys.scale() * acc + sys.field() * mag;
}

namespace detail {

/// Symmetric off-diagonal couplings J_ij = h_ij + h_ji.
inline std::vector<double> symmetric_offdiagonal(const SpinSystem& sys) {
  const int n = sys.size();
  std::vector<double> j(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b) j[static_cast<std::size_t>(a) * n + b] = sys.coupling(a, b) + sys.coupling(b, a);
    }
  }
  return j;
}

inline double log_sum_exp(std::span<const double> xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace detail

/// Energies of all 2^N configurations, indexed by SpinConfig::bits(),
/// visited in Gray-code order with single-flip updates.
inline std::vector<double> enumerate_energies(const SpinSystem& sys,
                                              int max_spins = kMaxExactSpins) {
  const int n = sys.size();
  if (n > max_spins) {
    throw SizeError("exact enumeration capped at N = " + std::to_string(max_spins));
  }
  const std::vector<double> jmat = detail::symmetric_offdiagonal(sys);
  const double scale = sys.scale();
  const double r = sys.field();
  const std::size_t states = std::size_t{1} << n;

  // start at all spins +1
  std::vector<double> local(n, 0.0);
  double diag = 0.0;
  for (int i = 0; i < n; ++i) {
    diag += sys.coupling(i, i);
    for (int j = 0; j < n; ++j) local[i] += jmat[static_cast<std::size_t>(i) * n + j];
  }
  double offdiag = 0.0;
  for (int i = 0; i < n; ++i) offdiag += 0.5 * local[i];
  double e = scale * (diag + offdiag) + r * n;

  std::vector<double> out(states);
  std::vector<int> s(n, 1);
  std::uint64_t gray = 0;
  out[0] = e;
  for (std::size_t step = 1; step < states; ++step) {
    const int k = std::countr_zero(step);
    const int sk = s[k];
    e += -2.0 * sk * (scale * local[k] + r);
    s[k] = -sk;
    for (int i = 0; i < n; ++i) local[i] -= 2.0 * sk * jmat[static_cast<std::size_t>(i) * n + k];
    gray ^= std::uint64_t{1} << k;
    out[gray] = e;
  }
  return out;
}

enum class GibbsMethod { ExactEnumeration, Metropolis };

struct GibbsSummary {
  double log_partition = 0.0;
  std::optional<std::vector<double>> pair_expectations;  // N x N row-major
  GibbsMethod method = GibbsMethod::ExactEnumeration;
  int sweeps = 0;
  int burn_in = 0;

  double pair(int n, int i, int j) const { return (*pair_expectations)[static_cast<std::size_t>(i) * n + j]; }
};

/// Normalized Gibbs weights for every configuration.
inline std::vector<double> gibbs_weights(std::span<const double> energies, double* log_z = nullptr) {
  const double lz = detail::log_sum_exp(energies);
  std::vector<double> p(energies.size());
  for (std::size_t c = 0; c < p.size(); ++c) p[c] = std::exp(energies[c] - lz);
  if (log_z) *log_z = lz;
  return p;
}

/// <s_i s_j> for all pairs from normalized weights indexed by config bits.
inline std::vector<double> pair_expectations_from_weights(std::span<const double> p, int n) {
  std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
  for (std::size_t c = 0; c < p.size(); ++c) {
    const double w = p[c];
    for (int i = 0; i < n; ++i) {
      const double wi = ((c >> i) & 1U) ? -w : w;
      for (int j = i + 1; j < n; ++j) {
        m[static_cast<std::size_t>(i) * n + j] += ((c >> j) & 1U) ? -wi : wi;
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    m[static_cast<std::size_t>(i) * n + i] = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double& v = m[static_cast<std::size_t>(i) * n + j];
      v = std::clamp(v, -1.0, 1.0);
      m[static_cast<std::size_t>(j) * n + i] = v;
    }
  }
  return m;
}

inline GibbsSummary free_energy_exact(const SpinSystem& sys, bool with_pairs = false,
                                      int max_spins = kMaxExactSpins) {
  const std::vector<double> e = enumerate_energies(sys, max_spins);
  GibbsSummary out;
  if (!with_pairs) {
    out.log_partition = detail::log_sum_exp(e);
    return out;
  }
  const std::vector<double> p = gibbs_weights(e, &out.log_partition);
  out.pair_expectations = pair_expectations_from_weights(p, sys.size());
  return out;
}

inline double gibbs_pair_expectation(const SpinSystem& sys, int i, int j) {
  const int n = sys.size();
  if (i < 0 || j < 0 || i >= n || j >= n) throw DimensionMismatch("gibbs_pair_expectation: index out of range");
  if (n > kMaxExactSpins) throw SizeError("exact enumeration capped at N = 20");
  if (i == j) return 1.0;
  const std::vector<double> p = gibbs_weights(enumerate_energies(sys));
  double acc = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    acc += (((c >> i) ^ (c >> j)) & 1U) ? -p[c] : p[c];
  }
  return std::clamp(acc, -1.0, 1.0);
}

/// Metropolis acceptance probability for a proposal raising the exponent by delta.
inline double metropolis_acceptance(double delta) { return delta >= 0.0 ? 1.0 : std::exp(delta); }

/// Single-spin-flip Metropolis chain, sites visited in order 0..N-1.
class MetropolisChain {
 public:
  MetropolisChain(const SpinSystem& sys, std::uint64_t seed)
      : n_(sys.size()),
        scale_(sys.scale()),
        field_(sys.field()),
        j_(detail::symmetric_offdiagonal(sys)),
        rng_(stream_key(seed, {static_cast<std::uint64_t>(Stream::Metropolis)})),
        s_(n_),
        local_(n_, 0.0) {
    for (int i = 0; i < n_; ++i) s_[i] = rng_.uniform() < 0.5 ? 1 : -1;
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < n_; ++k) local_[i] += j_[static_cast<std::size_t>(i) * n_ + k] * s_[k];
    }
  }

  void sweep() {
    for (int k = 0; k < n_; ++k) {
      const int sk = s_[k];
      const double delta = -2.0 * sk * (scale_ * local_[k] + field_);
      if (delta >= 0.0 || rng_.uniform() < std::exp(delta)) {
        s_[k] = -sk;
        for (int i = 0; i < n_; ++i) local_[i] -= 2.0 * sk * j_[static_cast<std::size_t>(i) * n_ + k];
      }
    }
  }

  SpinConfig state() const {
    std::uint64_t bits = 0;
    for (int i = 0; i < n_; ++i) {
      if (s_[i] < 0) bits |= std::uint64_t{1} << i;
    }
    return {bits, n_};
  }

  int spin(int i) const { return s_[i]; }

 private:
  int n_;
  double scale_;
  double field_;
  std::vector<double> j_;
  NormalStream rng_;
  std::vector<int> s_;
  std::vector<double> local_;
};

/// One configuration per sweep after burn_in sweeps.
inline std::vector<SpinConfig> metropolis_sample(const SpinSystem& sys, int sweeps, int burn_in,
                                                 std::uint64_t seed) {
  if (sweeps < 1) throw DomainError("metropolis_sample: sweeps must be positive");
  if (burn_in < 0) throw DomainError("metropolis_sample: burn_in must be nonnegative");
  MetropolisChain chain(sys, seed);
  for (int b = 0; b < burn_in; ++b) chain.sweep();
  std::vector<SpinConfig> out;
  out.reserve(sweeps);
  for (int s = 0; s < sweeps; ++s) {
    chain.sweep();
    out.push_back(chain.state());
  }
  return out;
}

/// R = 1 - 2 popcount(a xor b) / N.
inline double overlap(const SpinConfig& a, const SpinConfig& b) {
  if (a.size() != b.size()) throw DimensionMismatch("overlap: configs differ in size");
  return 1.0 - 2.0 * std::popcount(a.bits() ^ b.bits()) / static_cast<double>(a.size());
}

}  // namespace sklab
