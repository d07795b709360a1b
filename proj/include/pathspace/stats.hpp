#pragma once

// Order-independent reductions and Monte Carlo estimates with standard errors.

#include <cstdint>
#include <span>
#include <vector>

namespace pathspace::stats {

/// Pairwise (cascade) summation in index order; the result depends only on
/// the values and their order, never on how they were produced.
double pairwise_sum(std::span<const double> xs) noexcept;

inline constexpr double kDefaultZMax = 4.0;

struct EstimateWithCI {
  double mean = 0.0;
  double se = 0.0;
  std::int64_t count = 0;
  double target = 0.0;
  double z = 0.0;
  double z_max = kDefaultZMax;
  bool pass = false;
  std::uint64_t seed = 0;
};

/// Sample mean and standard error of `xs`, z = (mean - target)/se. A zero
/// standard error passes only on exact agreement (|mean - target| <= 1e-12
/// relative).
EstimateWithCI estimate(std::span<const double> xs, double target, double z_max = kDefaultZMax,
                        std::uint64_t seed = 0);

double mean(std::span<const double> xs) noexcept;
/// Unbiased sample variance.
double variance(std::span<const double> xs) noexcept;

/// Least-squares slope of log(err) against log(dt).
double log_log_slope(std::span<const double> dt, std::span<const double> err);

}  // namespace pathspace::stats
