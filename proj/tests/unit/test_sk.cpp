#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sklab/disorder.hpp"
#include "sklab/sk.hpp"

using namespace sklab;

namespace {

// Direct double loop over every configuration and ordered pair.
double naive_log_z(const SpinSystem& sys) {
  const int n = sys.size();
  std::vector<double> ex;
  for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); ++c) {
    double h = 0.0, m = 0.0;
    for (int i = 0; i < n; ++i) {
      const double si = ((c >> i) & 1U) ? -1.0 : 1.0;
      m += si;
      for (int j = 0; j < n; ++j) {
        const double sj = ((c >> j) & 1U) ? -1.0 : 1.0;
        h += sys.coupling(i, j) * si * sj;
      }
    }
    ex.push_back(sys.beta() / std::sqrt(double(n)) * h + sys.field() * m);
  }
  double mx = ex[0];
  for (double v : ex) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : ex) s += std::exp(v - mx);
  return mx + std::log(s);
}

SpinSystem random_system(int n, double beta, std::uint64_t seed, double field = 0.0) {
  return SpinSystem(sample_couplings(make_gaussian(), n, seed), beta, field);
}

}  // namespace

TEST(Energy, ZeroCouplings) {
  const SpinSystem sys(3, 1.0, std::vector<double>(9, 0.0));
  for (std::uint64_t c = 0; c < 8; ++c) EXPECT_EQ(energy(sys, SpinConfig(c, 3)), 0.0);
}

TEST(Energy, SingleSelfPair) {
  const SpinSystem sys(1, 0.7, {2.5});
  EXPECT_DOUBLE_EQ(energy(sys, SpinConfig(0, 1)), 0.7 * 2.5);
  EXPECT_DOUBLE_EQ(energy(sys, SpinConfig(1, 1)), 0.7 * 2.5);
}

TEST(Energy, TwoSpinsHandSum) {
  const SpinSystem sys(2, 1.0, {1, 1, 1, 1});
  const int s[] = {1, -1};
  EXPECT_NEAR(energy(sys, SpinConfig::from_spins(s)), 0.0, 1e-15);
  const int u[] = {1, 1};
  EXPECT_NEAR(energy(sys, SpinConfig::from_spins(u)), 4.0 / std::sqrt(2.0), 1e-15);
}

TEST(Energy, FieldTerm) {
  const SpinSystem sys(2, 1.0, {0, 0, 0, 0}, 0.5);
  const int s[] = {1, 1};
  EXPECT_DOUBLE_EQ(energy(sys, SpinConfig::from_spins(s)), 1.0);
}

TEST(Energy, DimensionMismatch) {
  const SpinSystem sys(3, 1.0, std::vector<double>(9, 0.0));
  EXPECT_THROW(energy(sys, SpinConfig(0, 4)), DimensionMismatch);
  EXPECT_THROW(SpinSystem(3, 1.0, std::vector<double>(8, 0.0)), DimensionMismatch);
  EXPECT_THROW(SpinSystem(3, 0.0, std::vector<double>(9, 0.0)), DomainError);
}

TEST(FreeEnergy, SingleSpinIsShiftedLog2) {
  for (double c : {-1.3, 0.0, 0.4, 2.0}) {
    const SpinSystem sys(1, 0.9, {c});
    EXPECT_NEAR(free_energy_exact(sys).log_partition, 0.9 * c + std::log(2.0), 1e-12);
    EXPECT_NEAR(free_energy_exact(sys).log_partition, naive_log_z(sys), 1e-12);
  }
}

TEST(FreeEnergy, TinyBetaIsUniform) {
  for (int n : {3, 7, 12}) {
    const SpinSystem sys = random_system(n, 1e-12, 5 + n);
    EXPECT_NEAR(free_energy_exact(sys).log_partition, n * std::log(2.0), 1e-9);
  }
}

TEST(FreeEnergy, GrayCodeMatchesNaive) {
  int count = 0;
  const double betas[] = {0.3, 0.707, 1.5};
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 11;
    const double beta = betas[trial % 3];
    const double field = trial % 4 == 0 ? 0.3 : 0.0;
    const SpinSystem sys = random_system(n, beta, 1000 + trial, field);
    EXPECT_NEAR(free_energy_exact(sys).log_partition, naive_log_z(sys), 1e-9) << "N=" << n << " beta=" << beta;
    ++count;
  }
  EXPECT_EQ(count, 50);
}

TEST(FreeEnergy, ConvexInBeta) {
  const DisorderMatrix m = sample_couplings(make_uniform(), 8, 42);
  std::vector<double> f;
  for (int i = 1; i <= 30; ++i) f.push_back(free_energy_exact(SpinSystem(m, 0.1 * i)).log_partition);
  for (std::size_t i = 1; i + 1 < f.size(); ++i) EXPECT_GE(f[i - 1] - 2 * f[i] + f[i + 1], -1e-9) << i;
}

TEST(FreeEnergy, BlockDiagonalAdds) {
  // at equal N the 1/sqrt(N) scale is shared, so build the blocks directly
  const int n = 8, half = 4;
  const DisorderMatrix a = sample_couplings(make_gaussian(), half, 1);
  const DisorderMatrix b = sample_couplings(make_gaussian(), half, 2);
  std::vector<double> h(n * n, 0.0);
  for (int i = 0; i < half; ++i) {
    for (int j = 0; j < half; ++j) {
      h[i * n + j] = a.couplings[i * half + j];
      h[(i + half) * n + j + half] = b.couplings[i * half + j];
    }
  }
  const double beta = 1.1;
  const double scale_fix = std::sqrt(double(n) / half);  // keep the per-block scale beta/sqrt(half)
  const SpinSystem whole(n, beta * scale_fix, h);
  const SpinSystem sa(a, beta), sb(b, beta);
  EXPECT_NEAR(free_energy_exact(whole).log_partition,
              free_energy_exact(sa).log_partition + free_energy_exact(sb).log_partition, 1e-10);
}

TEST(FreeEnergy, SizeCap) {
  const SpinSystem big(21, 1.0, std::vector<double>(21 * 21, 0.0));
  EXPECT_THROW(free_energy_exact(big), SizeError);
  EXPECT_THROW(gibbs_pair_expectation(big, 0, 1), SizeError);
  EXPECT_THROW(free_energy_exact(random_system(6, 1.0, 3), false, 5), SizeError);
}

TEST(Gibbs, PairExpectationBasics) {
  const SpinSystem sys = random_system(7, 1.2, 77);
  const GibbsSummary g = free_energy_exact(sys, true);
  ASSERT_TRUE(g.pair_expectations.has_value());
  for (int i = 0; i < 7; ++i) {
    EXPECT_EQ(g.pair(7, i, i), 1.0);
    for (int j = 0; j < 7; ++j) {
      EXPECT_LE(std::abs(g.pair(7, i, j)), 1.0);
      EXPECT_EQ(g.pair(7, i, j), g.pair(7, j, i));
      EXPECT_NEAR(g.pair(7, i, j), gibbs_pair_expectation(sys, i, j), 1e-12);
    }
  }
}

TEST(Gibbs, ZeroCouplingsDecorrelate) {
  const SpinSystem sys(5, 1.0, std::vector<double>(25, 0.0));
  EXPECT_NEAR(gibbs_pair_expectation(sys, 1, 3), 0.0, 1e-15);
  EXPECT_EQ(gibbs_pair_expectation(sys, 2, 2), 1.0);
}

TEST(Gibbs, TwoSpinHandEnumeration) {
  // exponents: aligned 4/sqrt2, anti-aligned 0
  const SpinSystem sys(2, 1.0, {1, 1, 1, 1});
  const double e = std::exp(4.0 / std::sqrt(2.0));
  const double expected = (2 * e - 2) / (2 * e + 2);
  EXPECT_NEAR(gibbs_pair_expectation(sys, 0, 1), expected, 1e-12);
}

TEST(Gibbs, GlobalFlipGauge) {
  const SpinSystem sys = random_system(9, 1.4, 606);
  const std::vector<double> e = enumerate_energies(sys);
  const std::vector<double> p = gibbs_weights(e);
  for (std::size_t c = 0; c < e.size(); ++c) {
    EXPECT_NEAR(e[c], e[SpinConfig(c, 9).complement().bits()], 1e-12);
  }
  for (int i = 0; i < 9; ++i) {
    double m = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) m += ((c >> i) & 1U) ? -p[c] : p[c];
    EXPECT_NEAR(m, 0.0, 1e-12);
  }
}

TEST(Metropolis, ZeroCouplingsUniform) {
  const SpinSystem sys(4, 1.0, std::vector<double>(16, 0.0));
  const auto s = metropolis_sample(sys, 100000, 100, 9);
  double m = 0.0;
  for (const auto& c : s) m += c.spin(0);
  EXPECT_NEAR(m / s.size(), 0.0, 0.02);
}

TEST(Metropolis, PairCorrelationMatchesExact) {
  const SpinSystem sys = random_system(8, 0.8, 31337);
  const double exact = gibbs_pair_expectation(sys, 0, 1);
  const auto s = metropolis_sample(sys, 1000000, 1000, 4);
  // batch means absorb autocorrelation
  const int batches = 100;
  const std::size_t per = s.size() / batches;
  std::vector<double> means(batches, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (std::size_t k = 0; k < per; ++k) {
      const auto& c = s[b * per + k];
      means[b] += c.spin(0) * c.spin(1);
    }
    means[b] /= per;
  }
  double mu = 0.0;
  for (double v : means) mu += v;
  mu /= batches;
  double var = 0.0;
  for (double v : means) var += (v - mu) * (v - mu);
  const double se = std::sqrt(var / (batches - 1) / batches);
  EXPECT_LT(std::abs(mu - exact), 3 * se + 1e-12) << "mu=" << mu << " exact=" << exact << " se=" << se;
}

TEST(Metropolis, DeterministicGivenSeed) {
  const SpinSystem sys = random_system(6, 1.0, 8);
  EXPECT_EQ(metropolis_sample(sys, 500, 10, 17), metropolis_sample(sys, 500, 10, 17));
  EXPECT_NE(metropolis_sample(sys, 500, 10, 17), metropolis_sample(sys, 500, 10, 18));
  EXPECT_THROW(metropolis_sample(sys, 0, 0, 1), DomainError);
}

TEST(Metropolis, DetailedBalance) {
  const SpinSystem sys = random_system(6, 1.3, 2718, 0.2);
  for (std::uint64_t c : {0ULL, 5ULL, 37ULL, 63ULL}) {
    const SpinConfig a(c, 6);
    for (int k = 0; k < 6; ++k) {
      const SpinConfig b = a.flipped(k);
      const double d = energy(sys, b) - energy(sys, a);
      const double ratio = metropolis_acceptance(d) / metropolis_acceptance(-d);
      EXPECT_NEAR(ratio, std::exp(d), 1e-12 * std::max(1.0, std::exp(d)));
    }
  }
}

TEST(Overlap, Examples) {
  const SpinConfig a(0b1011, 4);
  EXPECT_EQ(overlap(a, a), 1.0);
  EXPECT_EQ(overlap(a, a.complement()), -1.0);
  const int x[] = {1, 1, -1, -1};
  const int y[] = {1, -1, -1, 1};
  EXPECT_EQ(overlap(SpinConfig::from_spins(x), SpinConfig::from_spins(y)), 0.0);
  EXPECT_THROW(overlap(SpinConfig(0, 4), SpinConfig(0, 5)), DimensionMismatch);
}

TEST(Overlap, ValuesOnLattice) {
  for (std::uint64_t a = 0; a < 32; ++a) {
    for (std::uint64_t b = 0; b < 32; ++b) {
      const double r = overlap(SpinConfig(a, 5), SpinConfig(b, 5));
      const double k = (1.0 - r) * 5 / 2;
      EXPECT_NEAR(k, std::round(k), 1e-12);
    }
  }
}
