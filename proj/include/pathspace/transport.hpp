#pragma once

// Parallel translation along discrete paths for the induced connection and
// its adjoint, damped parallel translation W, and the operator pair
// u -> W int W^{-1} u and v -> W d/dt (W^{-1} v).
//
// Everything is stored in orthonormal frames: parallel[k] and adjoint[k] are
// d x n matrices whose columns are the translates of a fixed orthonormal
// basis at x_0, and damping[k] is the n x n matrix of W_k written in the
// adjoint frames, W_k (adjoint[0] c) = adjoint[k] damping[k] c.

#include "pathspace/sde.hpp"

namespace pathspace::transport {

using sde::SolutionPath;

struct TransportFrame {
  std::vector<Mat> parallel;
  std::vector<Mat> adjoint;
  std::vector<Mat> damping;
  std::vector<Mat> damping_inverse;

  int steps() const noexcept { return static_cast<int>(parallel.size()) - 1; }
};

/// Fills `parallel` and `adjoint` by projection + polar re-orthonormalisation.
TransportFrame parallel_translate(const SolutionPath& path);
/// Fills `damping` by RK4 on d/dt What = Ahat What in the adjoint frames,
/// Ahat = frame coordinates of -Ric#/2 + nabla A (interpolated linearly
/// within each step).
void damped_translate(const SolutionPath& path, TransportFrame& frame);
/// Both of the above.
TransportFrame transport_frames(const SolutionPath& path);

/// Orthonormal coordinates of v in T_{x_k} w.r.t. a frame column set.
Vec coords(const SolutionPath& path, const Mat& frame_k, int k, const Vec& v);

Vec parallel_apply(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v0);
Vec damped_apply(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v0);
/// W_k^{-1} v in frame coordinates at x_0.
Vec damped_inverse_coords(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v);
/// W_k^* v (metric adjoint) in frame coordinates at x_0.
Vec damped_adjoint_coords(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v);
/// W_k applied to frame coordinates at x_0.
Vec damped_from_coords(const TransportFrame& frame, int k, const Vec& c);
/// (W_k^{-1})^* applied to frame coordinates at x_0.
Vec damped_inverse_adjoint_from_coords(const TransportFrame& frame, int k, const Vec& c);

/// Largest |F^T G F - I| over all stored parallel and adjoint frames.
double isometry_defect(const SolutionPath& path, const TransportFrame& frame);

/// Density u_k ~ Dv/dt = W_k d/dt(W^{-1} v)_k: centred differences inside,
/// second-order one-sided differences at both ends. Needs N >= 4.
std::vector<Vec> covariant_time_derivative(const SolutionPath& path, const TransportFrame& frame,
                                           const PathVectorField& v);

/// W_t int_0^t W_s^{-1} u_s ds for a node density u, trapezoid rule.
PathVectorField script_W(const SolutionPath& path, const TransportFrame& frame,
                         const std::vector<Vec>& u);

}  // namespace pathspace::transport
