#include "pathspace/stats.hpp"

#include <cmath>

namespace pathspace::stats {

double pairwise_sum(std::span<const double> xs) noexcept {
  if (xs.size() <= 16) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

double mean(std::span<const double> xs) noexcept {
  return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) noexcept {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return pairwise_sum(sq) / static_cast<double>(xs.size() - 1);
}

EstimateWithCI estimate(std::span<const double> xs, double target, double z_max, std::uint64_t seed) {
  EstimateWithCI e;
  e.count = static_cast<std::int64_t>(xs.size());
  e.mean = mean(xs);
  e.se = xs.size() > 1 ? std::sqrt(variance(xs) / static_cast<double>(xs.size())) : 0.0;
  e.target = target;
  e.z_max = z_max;
  e.seed = seed;
  const double diff = e.mean - target;
  if (e.se > 0.0) {
    e.z = diff / e.se;
    e.pass = std::abs(e.z) <= z_max;
  } else {
    const bool exact = std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(target));
    e.z = exact ? 0.0 : std::copysign(INFINITY, diff);
    e.pass = exact;
  }
  return e;
}

double log_log_slope(std::span<const double> dt, std::span<const double> err) {
  const std::size_t n = dt.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(dt[i]), y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return denom == 0.0 ? NAN : (n * sxy - sx * sy) / denom;
}

}  // namespace pathspace::stats
