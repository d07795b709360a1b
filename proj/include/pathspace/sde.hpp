#pragma once

// Stratonovich integration of dx = X(x) o dB + A(x) dt, the derivative of the
// discrete Ito map, the covariant route to the same derivative, and the
// relevant/redundant split of the driving noise.

#include "pathspace/geometry.hpp"
#include "pathspace/path_types.hpp"

namespace pathspace::transport {
struct TransportFrame;
}

namespace pathspace::sde {

using geometry::ModelPtr;

/// Sup-norm constraint residual above which a step is considered failed.
inline constexpr double kRetractionTol = 1e-6;

struct SolutionPath {
  ModelPtr model;
  BrownianDriver driver;
  std::vector<Vec> points;  // x_0 .. x_N

  const TimeGrid& grid() const noexcept { return driver.grid; }
  int steps() const noexcept { return driver.grid.steps; }
};

SolutionPath integrate(ModelPtr model, const Vec& x0, BrownianDriver driver);

/// x_N only, drawing increments on the fly; same numbers as
/// integrate(model, x0, sample_driver(...)).points.back().
Vec integrate_terminal(const geometry::Manifold& model, const Vec& x0, const TimeGrid& grid,
                       std::uint64_t seed, std::uint64_t path);

/// v = T I(h): exact derivative of the discrete solution map in the driver
/// direction h, v_{k+1} = J_x v_k + J_b hdot_k dt, v_0 = 0.
PathVectorField bismut_derivative(const SolutionPath& path, const CameronMartinVector& h);

/// (I(B + eps h) - I(B - eps h)) / 2 eps, node by node.
PathVectorField ito_map_fd(const SolutionPath& path, const CameronMartinVector& h, double eps = 1e-4);

/// dB_k = tpar_k (dBtilde_k + dbeta_k) with tpar the parallel translation of
/// the direct-sum connection K^perp d K^perp + K d K on the trivial bundle.
struct NoiseSplit {
  std::vector<Mat> frames;      // tpar_k, m x m orthogonal, k = 0..N
  std::vector<Vec> relevant;    // dBtilde_k in (ker X(x_0))^perp
  std::vector<Vec> redundant;   // dbeta_k in ker X(x_0)
  int redundant_dim = 0;
  int reorthonormalized = 0;    // steps where drift beyond 1e-8 was corrected
};

NoiseSplit decompose_noise(const SolutionPath& path);

/// Fresh redundant increments K(x_0) z sqrt(dt) for resample `index`.
std::vector<Vec> fresh_redundant(const SolutionPath& path, std::uint64_t index);

struct Resampled {
  SolutionPath path;
  NoiseSplit split;
  double max_deviation = 0.0;  // sup_k |x'_k - x_k|
};

/// Rebuilds dB'_k = tpar'_k (dBtilde_k + dbeta'_k) while re-integrating, so
/// tpar' follows the new path. Throws `divergence` when the new path leaves
/// the old one by more than tolerance_factor * dt.
Resampled reconstruct_driver(const SolutionPath& path, const NoiseSplit& split,
                             const std::vector<Vec>& beta, double tolerance_factor = 10.0);

/// Solves the covariant equation for v in u = W^{-1} v by Euler-Maruyama:
/// u_{k+1} = u_k + W_k^{-1}[nabla_{v_k} X(K(x_k) dB_k) + X(x_k) hdot_k dt].
PathVectorField covariant_derivative_path(const SolutionPath& path, const NoiseSplit& split,
                                          const transport::TransportFrame& frame,
                                          const CameronMartinVector& h);

/// Smallest |det| of the tangent-restricted step Jacobian below which the
/// linearised flow is treated as singular.
inline constexpr double kSingularDet = 1e-12;

}  // namespace pathspace::sde
