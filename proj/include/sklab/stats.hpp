#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sklab/errors.hpp"

namespace sklab {

/// Pairwise summation in fixed order.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean with standard error sd / sqrt(n).
inline MeanEstimate estimate_mean(std::span<const double> xs) {
  if (xs.empty()) throw TooFewSamples("estimate_mean: no samples");
  MeanEstimate e;
  e.count = xs.size();
  const double n = static_cast<double>(xs.size());
  e.mean = pairwise_sum(xs) / n;
  if (xs.size() < 2) return e;
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - e.mean) * (xs[i] - e.mean);
  e.std_error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return e;
}

struct VarianceEstimate {
  double var = 0.0;
  double std_error = 0.0;
};

/// Unbiased sample variance and delete-one jackknife standard error.
inline VarianceEstimate estimate_variance_jackknife(std::span<const double> xs) {
  const std::size_t count = xs.size();
  if (count < 3) throw TooFewSamples("jackknife variance needs at least 3 values");
  const double n = static_cast<double>(count);
  const double mean = pairwise_sum(xs) / n;
  std::vector<double> d(count), d2(count);
  for (std::size_t i = 0; i < count; ++i) {
    d[i] = xs[i] - mean;
    d2[i] = d[i] * d[i];
  }
  const double s1 = pairwise_sum(d);
  const double s2 = pairwise_sum(d2);
  VarianceEstimate out;
  out.var = (s2 - s1 * s1 / n) / (n - 1.0);
  std::vector<double> loo(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = s1 - d[i];
    loo[i] = (s2 - d2[i] - a * a / (n - 1.0)) / (n - 2.0);
  }
  const double loo_mean = pairwise_sum(loo) / n;
  std::vector<double> dev(count);
  for (std::size_t i = 0; i < count; ++i) dev[i] = (loo[i] - loo_mean) * (loo[i] - loo_mean);
  out.std_error = std::sqrt((n - 1.0) / n * pairwise_sum(dev));
  return out;
}

}  // namespace sklab
