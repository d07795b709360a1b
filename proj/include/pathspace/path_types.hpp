#pragma once

// Grid-level containers shared by the engine, transport and path-space code.

#include "pathspace/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace pathspace {

struct TimeGrid {
  double horizon = 1.0;
  int steps = 1000;

  double dt() const noexcept { return horizon / steps; }
  double time(int k) const noexcept { return horizon * k / steps; }
  /// Nearest node to t.
  int snap(double t) const;
  void validate() const;
  static TimeGrid make(double horizon, int steps);
};

/// Increments Delta B_k, k = 0..N-1, of a Brownian motion on R^m.
struct BrownianDriver {
  TimeGrid grid;
  int dim = 0;
  std::vector<Vec> increments;
  std::uint64_t seed = 0;
  std::uint64_t path = 0;
  int refinements = 0;  // bridge refinements applied since sampling

  /// B at node k (cumulative sum of increments).
  std::vector<Vec> values() const;
};

BrownianDriver sample_driver(const TimeGrid& grid, int dim, std::uint64_t seed, std::uint64_t path);
BrownianDriver zero_driver(const TimeGrid& grid, int dim);
/// Halves dt by Brownian-bridge midpoint insertion; the coarse increments are
/// the pairwise sums of the fine ones.
BrownianDriver refine_driver(const BrownianDriver& coarse);
/// Samples at `steps` and refines `levels` times.
BrownianDriver coupled_driver(double horizon, int coarse_steps, int levels, int dim,
                              std::uint64_t seed, std::uint64_t path);

/// Cameron-Martin direction h, stored by its slope on each grid cell.
struct CameronMartinVector {
  double dt = 0.0;
  std::vector<Vec> slopes;

  int steps() const noexcept { return static_cast<int>(slopes.size()); }
  double norm_squared() const;
  CameronMartinVector scaled(double c) const;

  static CameronMartinVector zero(const TimeGrid& grid, int dim);
  /// Slope on cell k is slope(t_k + dt/2).
  static CameronMartinVector from_slope(const TimeGrid& grid, const std::function<Vec(double)>& slope);
};

/// B + eps h.
BrownianDriver shifted(const BrownianDriver& driver, const CameronMartinVector& h, double eps);

/// Tangent vectors v_k at the nodes of a path, k = 0..N.
struct PathVectorField {
  std::vector<Vec> values;
};

}  // namespace pathspace
