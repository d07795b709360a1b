#pragma once

// Bismut tangent vectors along a sample path, the projection of Cameron-Martin
// directions onto them (xbar) with its isometric right inverse (ybar),
// cylindrical functions with their H-differential, H-one-forms and the
// pull-back stochastic integral.
//
// Discrete conventions: densities live on grid cells and are evaluated at the
// left node of each cell; H- and calligraphic-H inner products are left
// Riemann sums. With these, ybar is exactly isometric, xbar o ybar = id and
// ybar o xbar = K^perp hold to rounding.

#include "pathspace/stats.hpp"
#include "pathspace/transport.hpp"

#include <functional>
#include <span>

namespace pathspace::paths {

using sde::NoiseSplit;
using sde::SolutionPath;
using transport::TransportFrame;

/// v along a path, stored by u_k = Dv/ds on cell k (u_k in T_{x_k}M) and the
/// values v_k = W_k sum_{j<k} W_j^{-1} u_j dt that it generates.
struct BismutTangent {
  std::vector<Vec> density;
  PathVectorField field;
};

/// ||v||^2 = sum_k |u_k|^2 dt in the path's metric.
double h_norm_squared(const SolutionPath& path, const BismutTangent& v);

/// Builds a tangent from its cell density.
BismutTangent from_density(const SolutionPath& path, const TransportFrame& frame,
                           std::vector<Vec> density);

/// xbar(h)_t = W_t int_0^t W_s^{-1} X(x_s) hdot_s ds.
BismutTangent xbar(const SolutionPath& path, const TransportFrame& frame, const CameronMartinVector& h);

/// ybar(v)(t) = int_0^t Y(x_s) (Dv/ds) ds.
CameronMartinVector ybar(const SolutionPath& path, const BismutTangent& v);

/// K^perp h: hdot_s -> K^perp(x_s) hdot_s.
CameronMartinVector relevant_part(const SolutionPath& path, const CameronMartinVector& h);

/// f(sigma) = g(sigma(t_1), ..., sigma(t_q)) with the ambient gradient of g.
struct CylindricalFunction {
  using Value = std::function<double(std::span<const Vec>)>;
  using Gradient = std::function<std::vector<Vec>(std::span<const Vec>)>;

  std::vector<int> nodes;
  Value g;
  Gradient grad;

  static CylindricalFunction make(const TimeGrid& grid, const std::vector<double>& times, Value g, Gradient grad);
  double operator()(const SolutionPath& path) const;
};

/// sum_i <grad_i g(sigma(t_1), ...), v_{t_i}> (ambient pairing, i.e. df(v)).
double cylindrical_dH(const CylindricalFunction& f, const SolutionPath& path, const PathVectorField& v);

/// H-one-form phi, stored by the cell density rho_k of the dual field's
/// damped derivative: phi(v) = sum_k <rho_k, (Dv/ds)_k> dt.
struct HOneForm {
  std::vector<Vec> density;
  bool adapted = false;

  double operator()(const SolutionPath& path, const BismutTangent& v) const;
};

/// The form v -> int_0^T <alpha_t, v_t> dt for a node field alpha along the
/// path, via rho_t = (W_t^{-1})^* int_t^T W_s^* alpha_s ds. The outer
/// integral uses trapezoid weights, and the same weights are used by
/// `direct_pairing`, so the two agree to rounding on every Bismut tangent.
HOneForm form_from_density(const SolutionPath& path, const TransportFrame& frame,
                           const std::vector<Vec>& alpha);

/// int_0^T <alpha_t, v_t> dt with trapezoid weights over the nodes.
double direct_pairing(const SolutionPath& path, const std::vector<Vec>& alpha, const PathVectorField& v);

/// I^*(phi)(h) = sum_k <rho_k, nabla_{v_k} X(tpar_k dbeta_k)> + <rho_k, X(x_k) hdot_k> dt
/// with v = T I(h). Left-point rule for both sums.
double pullback_one_form(const SolutionPath& path, const NoiseSplit& split, const HOneForm& phi,
                         const CameronMartinVector& h, const PathVectorField& tangent);

/// Builds the one-form density along a (possibly resampled) path.
using FormBuilder = std::function<HOneForm(const SolutionPath&, const TransportFrame&)>;

struct ConditionalSample {
  double target = 0.0;          // phi(xbar h) on the base path
  std::vector<double> samples;  // I^*(phi)(h) over beta resamples
};

/// Draws `resamples` redundant-noise replacements for the base path and
/// evaluates the pull-back on each; the caller reduces the samples.
ConditionalSample conditional_pullback_samples(const SolutionPath& base, const FormBuilder& phi,
                                               const CameronMartinVector& h, int resamples,
                                               std::uint64_t first_index = 0);

/// Monte Carlo mean of the pull-back over resamples against phi(xbar h).
stats::EstimateWithCI conditional_pullback_check(const SolutionPath& base, const FormBuilder& phi,
                                                 const CameronMartinVector& h, int resamples,
                                                 double z_max = stats::kDefaultZMax);

}  // namespace pathspace::paths
