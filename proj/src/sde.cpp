#include "pathspace/sde.hpp"

#include "pathspace/rng.hpp"
#include "pathspace/transport.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace pathspace::sde {

namespace {

using geometry::Manifold;

Vec checked_step(const Manifold& model, const Vec& x, const Vec& b, double dt, int k) {
  Vec next = model.step(x, b, dt);
  const double res = model.constraint_residual(next);
  if (!(res <= kRetractionTol))
    fail(ErrorCode::numerical_failure, "retraction failed at step " + std::to_string(k) +
                                           " (constraint residual " + std::to_string(res) + ")");
  return next;
}

Mat orthogonal_factor(const Mat& m) {
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

bool is_identity(const Mat& m) {
  return (m - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() < 1e-15;
}

// One step of the direct-sum connection's translation, K^perp(x_{k+1})
// K^perp(x_k) + K(x_{k+1}) K(x_k), made exactly orthogonal.
struct SplitTransport {
  const Manifold& model;
  Mat frame;
  Mat relevant_proj;
  int reorthonormalized = 0;

  SplitTransport(const Manifold& m, const Vec& x0)
      : model(m), frame(Mat::Identity(m.noise_dim(), m.noise_dim())), relevant_proj(m.relevant_projection(x0)) {}

  void advance(const Vec& next) {
    const int m = model.noise_dim();
    const Mat kp_next = model.relevant_projection(next);
    const Mat id = Mat::Identity(m, m);
    const Mat step = kp_next * relevant_proj + (id - kp_next) * (id - relevant_proj);
    if (!is_identity(step)) frame = orthogonal_factor(step) * frame;
    if ((frame.transpose() * frame - id).cwiseAbs().maxCoeff() > 1e-8) {
      frame = orthogonal_factor(frame);
      ++reorthonormalized;
    }
    relevant_proj = kp_next;
  }
};

}  // namespace

SolutionPath integrate(ModelPtr model, const Vec& x0, BrownianDriver driver) {
  geometry::require_on_manifold(*model, x0);
  driver.grid.validate();
  if (driver.dim != model->noise_dim() || static_cast<int>(driver.increments.size()) != driver.grid.steps)
    fail(ErrorCode::invalid_argument, "driver does not match the model's noise dimension or its grid");
  SolutionPath p{model, std::move(driver), {}};
  const int n = p.steps();
  const double dt = p.grid().dt();
  p.points.resize(n + 1);
  p.points[0] = x0;
  for (int k = 0; k < n; ++k) p.points[k + 1] = checked_step(*p.model, p.points[k], p.driver.increments[k], dt, k);
  return p;
}

Vec integrate_terminal(const Manifold& model, const Vec& x0, const TimeGrid& grid,
                       std::uint64_t seed, std::uint64_t path) {
  geometry::require_on_manifold(model, x0);
  grid.validate();
  const int m = model.noise_dim();
  const double scale = std::sqrt(grid.dt());
  double z[kMaxDim];
  Vec x = x0;
  for (int k = 0; k < grid.steps; ++k) {
    rng::standard_normals({seed, path}, k, rng::channel::driver, {z, static_cast<std::size_t>(m)});
    x = checked_step(model, x, scale * Eigen::Map<const Vec>(z, m), grid.dt(), k);
  }
  return x;
}

PathVectorField bismut_derivative(const SolutionPath& path, const CameronMartinVector& h) {
  const Manifold& model = *path.model;
  const int n = path.steps();
  if (h.steps() != n) fail(ErrorCode::invalid_argument, "direction and path grids differ");
  const double dt = path.grid().dt();
  PathVectorField v{std::vector<Vec>(n + 1)};
  v.values[0] = Vec::Zero(model.ambient_dim());
  for (int k = 0; k < n; ++k) {
    const Vec& x = path.points[k];
    const geometry::StepJacobians jac = model.step_jacobians(x, path.driver.increments[k], dt);
    const Mat basis = model.tangent_basis(x);
    const Mat image = jac.wrt_point * basis;
    Mat gram(basis.cols(), basis.cols());
    for (int i = 0; i < gram.rows(); ++i)
      for (int j = 0; j < gram.cols(); ++j) gram(i, j) = model.inner(x, image.col(i), image.col(j));
    if (!(std::sqrt(std::max(gram.determinant(), 0.0)) >= kSingularDet))
      fail(ErrorCode::numerical_failure,
           "linearised flow is singular at step " + std::to_string(k) + "; reduce the step size");
    v.values[k + 1] = jac.wrt_point * v.values[k] + jac.wrt_noise * (h.slopes[k] * dt);
  }
  return v;
}

PathVectorField ito_map_fd(const SolutionPath& path, const CameronMartinVector& h, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "finite-difference step must be positive");
  const SolutionPath up = integrate(path.model, path.points[0], shifted(path.driver, h, eps));
  const SolutionPath down = integrate(path.model, path.points[0], shifted(path.driver, h, -eps));
  PathVectorField v{std::vector<Vec>(path.points.size())};
  for (std::size_t k = 0; k < v.values.size(); ++k)
    v.values[k] = (up.points[k] - down.points[k]) / (2.0 * eps);
  return v;
}

NoiseSplit decompose_noise(const SolutionPath& path) {
  const Manifold& model = *path.model;
  const int n = path.steps(), m = model.noise_dim();
  NoiseSplit s;
  s.frames.resize(n + 1);
  s.relevant.resize(n);
  s.redundant.resize(n);
  s.redundant_dim = static_cast<int>(std::lround(m - model.relevant_projection(path.points[0]).trace()));
  SplitTransport tpar(model, path.points[0]);
  s.frames[0] = tpar.frame;
  for (int k = 0; k < n; ++k) {
    const Vec& dB = path.driver.increments[k];
    const Vec rel = tpar.relevant_proj * dB;
    s.relevant[k] = tpar.frame.transpose() * rel;
    s.redundant[k] = tpar.frame.transpose() * (dB - rel);
    tpar.advance(path.points[k + 1]);
    s.frames[k + 1] = tpar.frame;
  }
  s.reorthonormalized = tpar.reorthonormalized;
  return s;
}

std::vector<Vec> fresh_redundant(const SolutionPath& path, std::uint64_t index) {
  const Manifold& model = *path.model;
  const int m = model.noise_dim();
  const Mat kernel = model.redundant_projection(path.points[0]);
  const double scale = std::sqrt(path.grid().dt());
  std::vector<Vec> beta(path.steps());
  double z[kMaxDim];
  for (int k = 0; k < path.steps(); ++k) {
    rng::standard_normals({path.driver.seed, path.driver.path}, k, rng::channel::resample(index),
                          {z, static_cast<std::size_t>(m)});
    beta[k] = scale * (kernel * Eigen::Map<const Vec>(z, m));
  }
  return beta;
}

Resampled reconstruct_driver(const SolutionPath& path, const NoiseSplit& split,
                             const std::vector<Vec>& beta, double tolerance_factor) {
  const Manifold& model = *path.model;
  const int n = path.steps();
  if (static_cast<int>(beta.size()) != n || static_cast<int>(split.relevant.size()) != n)
    fail(ErrorCode::invalid_argument, "noise split and redundant increments must match the path grid");
  const double dt = path.grid().dt();
  Resampled out{SolutionPath{path.model, path.driver, std::vector<Vec>(n + 1)}, NoiseSplit{}, 0.0};
  NoiseSplit& s = out.split;
  s.frames.resize(n + 1);
  s.relevant.resize(n);
  s.redundant.resize(n);
  s.redundant_dim = split.redundant_dim;
  out.path.points[0] = path.points[0];
  SplitTransport tpar(model, path.points[0]);
  s.frames[0] = tpar.frame;
  for (int k = 0; k < n; ++k) {
    const Vec dB = tpar.frame * (split.relevant[k] + beta[k]);
    out.path.driver.increments[k] = dB;
    const Vec rel = tpar.relevant_proj * dB;
    s.relevant[k] = tpar.frame.transpose() * rel;
    s.redundant[k] = tpar.frame.transpose() * (dB - rel);
    out.path.points[k + 1] = checked_step(model, out.path.points[k], dB, dt, k);
    out.max_deviation = std::max(out.max_deviation, (out.path.points[k + 1] - path.points[k + 1]).norm());
    tpar.advance(out.path.points[k + 1]);
    s.frames[k + 1] = tpar.frame;
  }
  s.reorthonormalized = tpar.reorthonormalized;
  if (out.max_deviation > tolerance_factor * dt)
    fail(ErrorCode::divergence, "re-integrated path left the original by " + std::to_string(out.max_deviation) +
                                    " (limit " + std::to_string(tolerance_factor * dt) + ")");
  return out;
}

PathVectorField covariant_derivative_path(const SolutionPath& path, const NoiseSplit& split,
                                          const transport::TransportFrame& frame,
                                          const CameronMartinVector& h) {
  const Manifold& model = *path.model;
  const int n = path.steps();
  if (h.steps() != n || frame.steps() != n || static_cast<int>(split.redundant.size()) != n)
    fail(ErrorCode::invalid_argument, "direction, split and frame must share the path grid");
  const double dt = path.grid().dt();
  PathVectorField v{std::vector<Vec>(n + 1)};
  Vec u = Vec::Zero(model.intrinsic_dim());
  v.values[0] = Vec::Zero(model.ambient_dim());
  for (int k = 0; k < n; ++k) {
    const Vec& x = path.points[k];
    const Vec kernel_noise = split.frames[k] * split.redundant[k];
    const Vec force = model.nabla_diffusion(x, v.values[k], kernel_noise) + model.diffusion(x) * (h.slopes[k] * dt);
    u += transport::damped_inverse_coords(path, frame, k, force);
    v.values[k + 1] = transport::damped_from_coords(frame, k + 1, u);
  }
  return v;
}

}  // namespace pathspace::sde
