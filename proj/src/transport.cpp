#include "pathspace/transport.hpp"

#include <Eigen/LU>

#include <string>

namespace pathspace::transport {

namespace {

Mat connection_matrix(const geometry::Manifold& model, const Vec& x, const Mat& frame) {
  const int n = static_cast<int>(frame.cols());
  Mat a(n, n);
  for (int j = 0; j < n; ++j) {
    const Vec rhs = -0.5 * model.ricci_sharp(x, frame.col(j)) + model.nabla_drift(x, frame.col(j));
    for (int i = 0; i < n; ++i) a(i, j) = model.inner(x, frame.col(i), rhs);
  }
  return a;
}

void require_frame(const SolutionPath& path, const TransportFrame& frame) {
  if (frame.steps() != path.steps() || frame.damping.size() != frame.parallel.size())
    fail(ErrorCode::invalid_argument, "transport frame does not belong to this path");
}

}  // namespace

TransportFrame parallel_translate(const SolutionPath& path) {
  const geometry::Manifold& model = *path.model;
  const int n = path.steps();
  TransportFrame f;
  f.parallel.resize(n + 1);
  f.adjoint.resize(n + 1);
  f.parallel[0] = model.tangent_basis(path.points[0]);
  f.adjoint[0] = f.parallel[0];
  const bool same = model.adjoint_is_parallel();
  for (int k = 0; k < n; ++k) {
    f.parallel[k + 1] = model.transport_frame(path.points[k], path.points[k + 1], f.parallel[k]);
    f.adjoint[k + 1] = same ? f.parallel[k + 1]
                            : model.adjoint_transport_frame(path.points[k], path.points[k + 1], f.adjoint[k]);
  }
  return f;
}

void damped_translate(const SolutionPath& path, TransportFrame& frame) {
  const geometry::Manifold& model = *path.model;
  const int n = path.steps();
  if (frame.steps() != n) fail(ErrorCode::invalid_argument, "transport frame does not belong to this path");
  const int dim = model.intrinsic_dim();
  const double h = path.grid().dt();
  frame.damping.resize(n + 1);
  frame.damping_inverse.resize(n + 1);
  frame.damping[0] = Mat::Identity(dim, dim);
  frame.damping_inverse[0] = frame.damping[0];
  Mat a0 = connection_matrix(model, path.points[0], frame.adjoint[0]);
  for (int k = 0; k < n; ++k) {
    const Mat a1 = connection_matrix(model, path.points[k + 1], frame.adjoint[k + 1]);
    const Mat am = 0.5 * (a0 + a1);
    const Mat& w = frame.damping[k];
    const Mat k1 = a0 * w;
    const Mat k2 = am * (w + 0.5 * h * k1);
    const Mat k3 = am * (w + 0.5 * h * k2);
    const Mat k4 = a1 * (w + h * k3);
    frame.damping[k + 1] = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    frame.damping_inverse[k + 1] = frame.damping[k + 1].inverse();
    a0 = a1;
  }
}

TransportFrame transport_frames(const SolutionPath& path) {
  TransportFrame f = parallel_translate(path);
  damped_translate(path, f);
  return f;
}

Vec coords(const SolutionPath& path, const Mat& frame_k, int k, const Vec& v) {
  return path.model->frame_coords(path.points[k], frame_k, v);
}

Vec parallel_apply(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v0) {
  return frame.parallel[k] * coords(path, frame.parallel[0], 0, v0);
}

Vec damped_apply(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v0) {
  require_frame(path, frame);
  return damped_from_coords(frame, k, coords(path, frame.adjoint[0], 0, v0));
}

Vec damped_inverse_coords(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v) {
  return frame.damping_inverse[k] * coords(path, frame.adjoint[k], k, v);
}

Vec damped_adjoint_coords(const SolutionPath& path, const TransportFrame& frame, int k, const Vec& v) {
  return frame.damping[k].transpose() * coords(path, frame.adjoint[k], k, v);
}

Vec damped_from_coords(const TransportFrame& frame, int k, const Vec& c) {
  return frame.adjoint[k] * (frame.damping[k] * c);
}

Vec damped_inverse_adjoint_from_coords(const TransportFrame& frame, int k, const Vec& c) {
  return frame.adjoint[k] * (frame.damping_inverse[k].transpose() * c);
}

double isometry_defect(const SolutionPath& path, const TransportFrame& frame) {
  const geometry::Manifold& model = *path.model;
  double worst = 0.0;
  for (int k = 0; k <= frame.steps(); ++k) {
    for (const Mat* f : {&frame.parallel[k], &frame.adjoint[k]}) {
      for (int i = 0; i < f->cols(); ++i)
        for (int j = 0; j < f->cols(); ++j) {
          const double g = model.inner(path.points[k], f->col(i), f->col(j));
          worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    }
  }
  return worst;
}

std::vector<Vec> covariant_time_derivative(const SolutionPath& path, const TransportFrame& frame,
                                           const PathVectorField& v) {
  require_frame(path, frame);
  const int n = path.steps();
  if (n < 4) fail(ErrorCode::invalid_argument, "grid too coarse for the covariant derivative (N < 4)");
  if (static_cast<int>(v.values.size()) != n + 1) fail(ErrorCode::invalid_argument, "field has wrong length");
  std::vector<Vec> w(n + 1);
  for (int k = 0; k <= n; ++k) {
    geometry::require_tangent(*path.model, path.points[k], v.values[k]);
    w[k] = damped_inverse_coords(path, frame, k, v.values[k]);
  }
  const double inv2h = 0.5 / path.grid().dt();
  std::vector<Vec> u(n + 1);
  u[0] = damped_from_coords(frame, 0, (-3.0 * w[0] + 4.0 * w[1] - w[2]) * inv2h);
  for (int k = 1; k < n; ++k) u[k] = damped_from_coords(frame, k, (w[k + 1] - w[k - 1]) * inv2h);
  u[n] = damped_from_coords(frame, n, (3.0 * w[n] - 4.0 * w[n - 1] + w[n - 2]) * inv2h);
  return u;
}

PathVectorField script_W(const SolutionPath& path, const TransportFrame& frame, const std::vector<Vec>& u) {
  require_frame(path, frame);
  const int n = path.steps();
  if (static_cast<int>(u.size()) != n + 1) fail(ErrorCode::invalid_argument, "density has wrong length");
  const double half = 0.5 * path.grid().dt();
  PathVectorField out{std::vector<Vec>(n + 1)};
  Vec c = Vec::Zero(path.model->intrinsic_dim());
  Vec prev = damped_inverse_coords(path, frame, 0, u[0]);
  out.values[0] = damped_from_coords(frame, 0, c);
  for (int k = 0; k < n; ++k) {
    const Vec next = damped_inverse_coords(path, frame, k + 1, u[k + 1]);
    c += half * (prev + next);
    out.values[k + 1] = damped_from_coords(frame, k + 1, c);
    prev = next;
  }
  return out;
}

}  // namespace pathspace::transport
