#include "pathspace/path_space.hpp"

#include <cmath>
#include <string>

namespace pathspace::paths {

namespace {

void require_cells(const SolutionPath& path, std::size_t cells, const char* what) {
  if (static_cast<int>(cells) != path.steps())
    fail(ErrorCode::invalid_argument, std::string(what) + " does not match the path grid");
}

void require_finite(const std::vector<Vec>& xs, const char* what) {
  for (const Vec& x : xs)
    if (!x.allFinite()) fail(ErrorCode::numerical_failure, std::string(what) + " has non-finite entries");
}

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::vector<double> w(grid.steps + 1, grid.dt());
  w.front() = w.back() = 0.5 * grid.dt();
  return w;
}

}  // namespace

double h_norm_squared(const SolutionPath& path, const BismutTangent& v) {
  require_cells(path, v.density.size(), "tangent density");
  double s = 0.0;
  for (int k = 0; k < path.steps(); ++k) s += path.model->inner(path.points[k], v.density[k], v.density[k]);
  return s * path.grid().dt();
}

BismutTangent from_density(const SolutionPath& path, const TransportFrame& frame, std::vector<Vec> density) {
  require_cells(path, density.size(), "tangent density");
  const int n = path.steps();
  const double dt = path.grid().dt();
  BismutTangent v{std::move(density), PathVectorField{std::vector<Vec>(n + 1)}};
  Vec c = Vec::Zero(path.model->intrinsic_dim());
  v.field.values[0] = Vec::Zero(path.model->ambient_dim());
  for (int k = 0; k < n; ++k) {
    c += dt * transport::damped_inverse_coords(path, frame, k, v.density[k]);
    v.field.values[k + 1] = transport::damped_from_coords(frame, k + 1, c);
  }
  return v;
}

BismutTangent xbar(const SolutionPath& path, const TransportFrame& frame, const CameronMartinVector& h) {
  require_cells(path, h.slopes.size(), "Cameron-Martin direction");
  std::vector<Vec> u(path.steps());
  for (int k = 0; k < path.steps(); ++k) u[k] = path.model->diffusion(path.points[k]) * h.slopes[k];
  return from_density(path, frame, std::move(u));
}

CameronMartinVector ybar(const SolutionPath& path, const BismutTangent& v) {
  require_cells(path, v.density.size(), "tangent density");
  CameronMartinVector h{path.grid().dt(), std::vector<Vec>(path.steps())};
  for (int k = 0; k < path.steps(); ++k) h.slopes[k] = path.model->right_inverse(path.points[k], v.density[k]);
  return h;
}

CameronMartinVector relevant_part(const SolutionPath& path, const CameronMartinVector& h) {
  require_cells(path, h.slopes.size(), "Cameron-Martin direction");
  CameronMartinVector out = h;
  for (int k = 0; k < path.steps(); ++k) out.slopes[k] = path.model->relevant_projection(path.points[k]) * h.slopes[k];
  return out;
}

CylindricalFunction CylindricalFunction::make(const TimeGrid& grid, const std::vector<double>& times, Value g,
                                              Gradient grad) {
  CylindricalFunction f{{}, std::move(g), std::move(grad)};
  double last = -1.0;
  for (double t : times) {
    if (!(t > last)) fail(ErrorCode::invalid_argument, "cylindrical times must be strictly increasing");
    f.nodes.push_back(grid.snap(t));
    last = t;
  }
  return f;
}

double CylindricalFunction::operator()(const SolutionPath& path) const {
  std::vector<Vec> xs;
  xs.reserve(nodes.size());
  for (int k : nodes) {
    if (k < 0 || k > path.steps()) fail(ErrorCode::invalid_argument, "cylindrical time is off the path grid");
    xs.push_back(path.points[k]);
  }
  return g(xs);
}

double cylindrical_dH(const CylindricalFunction& f, const SolutionPath& path, const PathVectorField& v) {
  std::vector<Vec> xs;
  xs.reserve(f.nodes.size());
  for (int k : f.nodes) {
    if (k < 0 || k > path.steps() || k >= static_cast<int>(v.values.size()))
      fail(ErrorCode::invalid_argument, "cylindrical time is off the path grid");
    xs.push_back(path.points[k]);
  }
  const std::vector<Vec> grads = f.grad(xs);
  double s = 0.0;
  for (std::size_t i = 0; i < f.nodes.size(); ++i) s += grads[i].dot(v.values[f.nodes[i]]);
  return s;
}

double HOneForm::operator()(const SolutionPath& path, const BismutTangent& v) const {
  require_cells(path, density.size(), "one-form density");
  require_cells(path, v.density.size(), "tangent density");
  double s = 0.0;
  for (int k = 0; k < path.steps(); ++k) s += path.model->inner(path.points[k], density[k], v.density[k]);
  return s * path.grid().dt();
}

HOneForm form_from_density(const SolutionPath& path, const TransportFrame& frame, const std::vector<Vec>& alpha) {
  const int n = path.steps();
  if (static_cast<int>(alpha.size()) != n + 1) fail(ErrorCode::invalid_argument, "alpha must be given at every node");
  require_finite(alpha, "alpha");
  const std::vector<double> w = trapezoid_weights(path.grid());
  HOneForm phi{std::vector<Vec>(n), false};
  Vec tail = Vec::Zero(path.model->intrinsic_dim());
  for (int j = n - 1; j >= 0; --j) {
    tail += w[j + 1] * transport::damped_adjoint_coords(path, frame, j + 1, alpha[j + 1]);
    phi.density[j] = transport::damped_inverse_adjoint_from_coords(frame, j, tail);
  }
  return phi;
}

double direct_pairing(const SolutionPath& path, const std::vector<Vec>& alpha, const PathVectorField& v) {
  const int n = path.steps();
  if (static_cast<int>(alpha.size()) != n + 1 || static_cast<int>(v.values.size()) != n + 1)
    fail(ErrorCode::invalid_argument, "alpha and v must be given at every node");
  const std::vector<double> w = trapezoid_weights(path.grid());
  double s = 0.0;
  for (int k = 0; k <= n; ++k) s += w[k] * path.model->inner(path.points[k], alpha[k], v.values[k]);
  return s;
}

double pullback_one_form(const SolutionPath& path, const NoiseSplit& split, const HOneForm& phi,
                         const CameronMartinVector& h, const PathVectorField& tangent) {
  const geometry::Manifold& model = *path.model;
  const int n = path.steps();
  require_cells(path, phi.density.size(), "one-form density");
  require_cells(path, h.slopes.size(), "Cameron-Martin direction");
  require_cells(path, split.redundant.size(), "noise split");
  require_finite(phi.density, "one-form density");
  const double dt = path.grid().dt();
  double ito = 0.0, drift = 0.0;
  for (int k = 0; k < n; ++k) {
    const Vec& x = path.points[k];
    const Vec& rho = phi.density[k];
    if (split.redundant_dim > 0) {
      const Vec kernel_noise = split.frames[k] * split.redundant[k];
      ito += model.inner(x, rho, model.nabla_diffusion(x, tangent.values[k], kernel_noise));
    }
    drift += model.inner(x, rho, model.diffusion(x) * h.slopes[k]);
  }
  return ito + drift * dt;
}

ConditionalSample conditional_pullback_samples(const SolutionPath& base, const FormBuilder& phi,
                                               const CameronMartinVector& h, int resamples,
                                               std::uint64_t first_index) {
  if (resamples < 1) fail(ErrorCode::invalid_argument, "need at least one resample");
  const NoiseSplit split = sde::decompose_noise(base);
  const TransportFrame frame = transport::transport_frames(base);
  ConditionalSample out;
  out.target = phi(base, frame)(base, xbar(base, frame, h));
  out.samples.resize(resamples);
  for (int i = 0; i < resamples; ++i) {
    const auto beta = sde::fresh_redundant(base, first_index + static_cast<std::uint64_t>(i));
    const sde::Resampled r = sde::reconstruct_driver(base, split, beta);
    const TransportFrame f = transport::transport_frames(r.path);
    const PathVectorField v = sde::bismut_derivative(r.path, h);
    out.samples[i] = pullback_one_form(r.path, r.split, phi(r.path, f), h, v);
  }
  return out;
}

stats::EstimateWithCI conditional_pullback_check(const SolutionPath& base, const FormBuilder& phi,
                                                 const CameronMartinVector& h, int resamples, double z_max) {
  const ConditionalSample s = conditional_pullback_samples(base, phi, h, resamples);
  return stats::estimate(s.samples, s.target, z_max, base.driver.seed);
}

}  // namespace pathspace::paths
