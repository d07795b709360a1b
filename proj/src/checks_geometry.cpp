// Checks on the models themselves: the induced connection, its Ricci
// operator, the heat semigroup, and (damped) parallel translation.

#include "check_kit.hpp"

#include "pathspace/oracles.hpp"

#include <cmath>

namespace pathspace::harness::kit {

void lw_connection(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const int samples = ctx.paths(1000);
  double defining_fd = 0, defining = 0, versus_fd = 0, metric = 0, xy = 0, idem = 0;
  for (int i = 0; i < samples; ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const Vec x = geometry::random_point(*model, ctx.seed(), idx);
    const Vec v = geometry::random_tangent(*model, x, ctx.seed(), idx);
    const Vec noise = geometry::random_noise(*model, ctx.seed(), idx);
    const Mat kp = model->relevant_projection(x);
    const Vec e = kp * noise;
    const geometry::Field Xe = [&](const Vec& y) -> Vec { return model->diffusion(y) * e; };
    const geometry::Field Xn = [&](const Vec& y) -> Vec { return model->diffusion(y) * noise; };
    defining_fd = std::max(defining_fd, geometry::lw_covariant_derivative(*model, x, v, Xe).norm());
    defining = std::max(defining, model->nabla_diffusion(x, v, e).norm());
    versus_fd = std::max(versus_fd, (model->nabla_diffusion(x, v, noise) -
                                     geometry::lw_covariant_derivative(*model, x, v, Xn)).norm());
    const Vec u = geometry::random_tangent(*model, x, ctx.seed() + 1, idx);
    const Vec w = geometry::random_tangent(*model, x, ctx.seed() + 2, idx);
    if (i < 100) metric = std::max(metric, geometry::metric_defect_fd(*model, x, v, u, w));
    xy = std::max(xy, (model->diffusion(x) * model->right_inverse(x, v) - v).norm());
    idem = std::max(idem, (kp * kp - kp).cwiseAbs().maxCoeff());
  }
  ctx.bound("nabla-Xe-zero-on-relevant-e/fd", defining_fd, 1e-6);
  ctx.bound("nabla-Xe-zero-on-relevant-e/closed-form", defining, 1e-12);
  ctx.bound("closed-form-vs-fd", versus_fd, 1e-6);
  ctx.bound("metric-compatibility-fd", metric, 1e-5);
  ctx.bound("XY-identity", xy, 1e-10);
  ctx.bound("Kperp-idempotent", idem, 1e-12);
}

void ricci(Ctx& ctx) {
  const auto kinds = ctx.models();
  ctx.report.model = kinds.size() == 1 ? model_name(kinds[0]) : "both";
  const int samples = ctx.paths(100);
  for (ModelKind kind : kinds) {
    const geometry::ModelPtr model = geometry::make_model(kind);
    const double scalar = kind == ModelKind::sphere_gradient ? model->intrinsic_dim() - 1.0 : 0.0;
    double vs_fd = 0, closed = 0;
    for (int i = 0; i < samples; ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      const Vec x = geometry::random_point(*model, ctx.seed(), idx);
      const Vec v = geometry::random_tangent(*model, x, ctx.seed(), idx);
      const Vec ric = geometry::ricci_sharp(*model, x, v);
      vs_fd = std::max(vs_fd, (ric - geometry::ricci_sharp_fd(*model, x, v)).norm());
      closed = std::max(closed, (ric - scalar * v).norm());
    }
    ctx.bound(label("ricci-vs-curvature-fd", kind), vs_fd, 1e-4);
    if (kind == ModelKind::rotation_group) ctx.exact(label("ricci-vanishes", kind), closed, 0.0);
    else ctx.bound(label("ricci-equals-(n-1)id", kind), closed, 1e-14);
  }
}

namespace {

// <x_T, x_0> on the sphere, tr g_T on the group; both have closed-form means.
double heat_observable(const geometry::Manifold& model, const Vec& x0, const Vec& xt) {
  if (model.kind() == ModelKind::sphere_gradient) return xt.dot(x0);
  return geometry::as_mat3(xt).trace();
}

double heat_target(const geometry::Manifold& model, double T) {
  if (model.kind() == ModelKind::sphere_gradient) return std::exp(-0.5 * model.intrinsic_dim() * T);
  return 3.0 * std::exp(-T);
}

stats::EstimateWithCI heat_estimate(const Ctx& ctx, const geometry::Manifold& model, const TimeGrid& grid,
                                    int paths, std::uint64_t first_path) {
  const Vec x0 = model.base_point();
  const auto xs = parallel::map_indices<double>(paths, ctx.workers(), [&](long i) {
    const Vec xt = sde::integrate_terminal(model, x0, grid, ctx.seed(), first_path + i);
    return heat_observable(model, x0, xt);
  });
  return stats::estimate(xs, heat_target(model, grid.horizon), 3.0, ctx.seed());
}

}  // namespace

void heat_moment(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(1000);
  const int paths = ctx.paths(100000);
  const auto e = heat_estimate(ctx, *model, grid, paths, 0);
  ctx.biased("moment/dt=" + format_number(grid.dt()), e, 3.0, 5.0 * grid.dt());
  // Ten times finer grid on an independent, smaller ensemble.
  const TimeGrid fine = TimeGrid::make(grid.horizon, grid.steps * 10);
  const int fine_paths = std::max(100, paths / 20);
  const auto f = heat_estimate(ctx, *model, fine, fine_paths, paths);
  ctx.biased("moment/dt=" + format_number(fine.dt()), f, 3.0, 5.0 * fine.dt());
}

LevelErrors sweep_heat_moment(const Ctx& ctx, int levels) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const int finest = ctx.steps(64);
  const int coarse = coarse_steps(finest, levels);
  const int paths = ctx.paths(100000);
  const Vec x0 = model->base_point();
  const double target = heat_target(*model, ctx.cfg.horizon);
  const auto per_path = parallel::map_indices<std::vector<double>>(paths, ctx.workers(), [&](long i) {
    const auto drivers = coupled_levels(ctx.cfg.horizon, coarse, levels, model->noise_dim(), ctx.seed(), i);
    std::vector<double> obs;
    for (const auto& d : drivers) obs.push_back(heat_observable(*model, x0, sde::integrate(model, x0, d).points.back()));
    return obs;
  });
  // Weak error: |mean - target| per level, with the level's standard error.
  LevelErrors e;
  for (int l = 0; l < levels; ++l) {
    std::vector<double> xs(paths);
    for (int i = 0; i < paths; ++i) xs[i] = per_path[i][l];
    const auto est = stats::estimate(xs, target);
    e.dt.push_back(ctx.cfg.horizon / (coarse << l));
    e.error.push_back(std::abs(est.mean - target));
    e.error_se.push_back(est.se);
    e.worst.push_back(e.error.back());
  }
  e.finest = {e.error.back()};
  return e;
}

namespace {

struct DecayStats {
  double decay = 0.0;
  double isometry = 0.0;
  double tangent = 0.0;
};

}  // namespace

void transport_decay(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(1000);
  const int paths = ctx.paths(32);
  const double ric = kind == ModelKind::sphere_gradient ? model->intrinsic_dim() - 1.0 : 0.0;
  const auto per_path = parallel::map_indices<DecayStats>(paths, ctx.workers(), [&](long i) {
    const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
    const transport::TransportFrame f = transport::transport_frames(p);
    const Vec v0 = geometry::random_tangent(*model, p.points[0], ctx.seed(), i);
    DecayStats s;
    s.isometry = transport::isometry_defect(p, f);
    for (int k = 0; k <= p.steps(); ++k) {
      const Vec w = transport::damped_apply(p, f, k, v0);
      const double norm = std::sqrt(model->inner(p.points[k], w, w) / model->inner(p.points[0], v0, v0));
      s.decay = std::max(s.decay, std::abs(norm * std::exp(0.5 * ric * grid.time(k)) - 1.0));
      if (kind == ModelKind::rotation_group) {
        // W = adjoint (right) translation v0 g_0^T g_k.
        const Mat3 expect = geometry::as_mat3(v0) * geometry::as_mat3(p.points[0]).transpose() *
                            geometry::as_mat3(p.points[k]);
        s.tangent = std::max(s.tangent, (w - geometry::from_mat3(expect)).norm());
      } else {
        s.tangent = std::max(s.tangent, model->tangent_residual(p.points[k], w));
      }
    }
    return s;
  });
  DecayStats worst;
  for (const auto& s : per_path) {
    worst.decay = std::max(worst.decay, s.decay);
    worst.isometry = std::max(worst.isometry, s.isometry);
    worst.tangent = std::max(worst.tangent, s.tangent);
  }
  if (kind == ModelKind::sphere_gradient) {
    ctx.bound("damped-norm-vs-exp(-Ric t/2)", worst.decay, 1e-8);
    ctx.bound("damped-translate-stays-tangent", worst.tangent, 1e-10);
    // Great circle through the base point: translation is a rotation.
    const double speed = 1.3;
    BrownianDriver d = zero_driver(grid, 3);
    for (auto& inc : d.increments) inc[0] = speed * grid.dt();
    const sde::SolutionPath p = sde::integrate(model, model->base_point(), d);
    const transport::TransportFrame f = transport::transport_frames(p);
    Vec along = Vec::Unit(3, 0), across = Vec::Unit(3, 1);
    double closed = 0.0;
    for (int k = 0; k <= p.steps(); ++k) {
      const double th = std::atan2(p.points[k][0], p.points[k][2]);
      Vec rotated(3);
      rotated << std::cos(th), 0.0, -std::sin(th);
      closed = std::max(closed, (transport::parallel_apply(p, f, k, along) - rotated).norm());
      closed = std::max(closed, (transport::parallel_apply(p, f, k, across) - across).norm());
    }
    ctx.bound("great-circle-closed-form", closed, 1e-10);
  } else {
    ctx.bound("damped-norm-preserved", worst.decay, 1e-10);
    ctx.bound("damped-equals-adjoint-translation", worst.tangent, 1e-10);
  }
  ctx.bound("frame-isometry", worst.isometry, 1e-10);
}

}  // namespace pathspace::harness::kit
