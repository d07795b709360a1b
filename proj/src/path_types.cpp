#include "pathspace/path_types.hpp"

#include "pathspace/rng.hpp"

#include <cmath>
#include <string>

namespace pathspace {

int TimeGrid::snap(double t) const {
  if (!(t >= -1e-12 && t <= horizon + 1e-12))
    fail(ErrorCode::invalid_argument, "time " + std::to_string(t) + " outside [0, T]");
  return static_cast<int>(std::lround(t / dt()));
}

void TimeGrid::validate() const {
  if (steps < 2) fail(ErrorCode::invalid_argument, "time grid needs at least 2 steps");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::invalid_argument, "horizon must be positive");
}

TimeGrid TimeGrid::make(double horizon, int steps) {
  TimeGrid g{horizon, steps};
  g.validate();
  return g;
}

std::vector<Vec> BrownianDriver::values() const {
  std::vector<Vec> out(increments.size() + 1);
  out[0] = Vec::Zero(dim);
  for (std::size_t k = 0; k < increments.size(); ++k) out[k + 1] = out[k] + increments[k];
  return out;
}

BrownianDriver sample_driver(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t path) {
  grid.validate();
  BrownianDriver d{grid, dim, std::vector<Vec>(grid.steps), seed, path, 0};
  const double scale = std::sqrt(grid.dt());
  double z[kMaxDim];
  for (int k = 0; k < grid.steps; ++k) {
    rng::standard_normals({seed, path}, k, rng::channel::driver, {z, static_cast<std::size_t>(dim)});
    d.increments[k] = scale * Eigen::Map<const Vec>(z, dim);
  }
  return d;
}

BrownianDriver zero_driver(const TimeGrid& grid, int dim) {
  grid.validate();
  return BrownianDriver{grid, dim, std::vector<Vec>(grid.steps, Vec::Zero(dim)), 0, 0, 0};
}

BrownianDriver refine_driver(const BrownianDriver& coarse) {
  BrownianDriver fine = coarse;
  fine.grid.steps = 2 * coarse.grid.steps;
  fine.refinements = coarse.refinements + 1;
  fine.increments.resize(fine.grid.steps);
  const double half_sd = 0.5 * std::sqrt(coarse.grid.dt());
  const std::uint64_t ch = rng::channel::bridge(static_cast<std::uint64_t>(coarse.refinements));
  double z[kMaxDim];
  for (int k = 0; k < coarse.grid.steps; ++k) {
    rng::standard_normals({coarse.seed, coarse.path}, k, ch, {z, static_cast<std::size_t>(coarse.dim)});
    const Vec mid = 0.5 * coarse.increments[k];
    const Vec wiggle = half_sd * Eigen::Map<const Vec>(z, coarse.dim);
    fine.increments[2 * k] = mid + wiggle;
    fine.increments[2 * k + 1] = mid - wiggle;
  }
  return fine;
}

BrownianDriver coupled_driver(double horizon, int coarse_steps, int levels, int dim,
                              std::uint64_t seed, std::uint64_t path) {
  BrownianDriver d = sample_driver(TimeGrid::make(horizon, coarse_steps), dim, seed, path);
  for (int l = 0; l < levels; ++l) d = refine_driver(d);
  return d;
}

double CameronMartinVector::norm_squared() const {
  double s = 0.0;
  for (const Vec& v : slopes) s += v.squaredNorm();
  return s * dt;
}

CameronMartinVector CameronMartinVector::scaled(double c) const {
  CameronMartinVector out = *this;
  for (Vec& v : out.slopes) v *= c;
  return out;
}

CameronMartinVector CameronMartinVector::zero(const TimeGrid& grid, int dim) {
  return {grid.dt(), std::vector<Vec>(grid.steps, Vec::Zero(dim))};
}

CameronMartinVector CameronMartinVector::from_slope(const TimeGrid& grid,
                                                    const std::function<Vec(double)>& slope) {
  CameronMartinVector h{grid.dt(), std::vector<Vec>(grid.steps)};
  for (int k = 0; k < grid.steps; ++k) h.slopes[k] = slope(grid.time(k) + 0.5 * grid.dt());
  return h;
}

BrownianDriver shifted(const BrownianDriver& driver, const CameronMartinVector& h, double eps) {
  if (h.steps() != driver.grid.steps) fail(ErrorCode::invalid_argument, "direction and driver grids differ");
  BrownianDriver out = driver;
  for (int k = 0; k < h.steps(); ++k) out.increments[k] += (eps * h.dt) * h.slopes[k];
  return out;
}

}  // namespace pathspace
