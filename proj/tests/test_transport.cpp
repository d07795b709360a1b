#include <doctest.h>

#include "pathspace/transport.hpp"

#include <cmath>

using namespace pathspace;
using namespace pathspace::transport;

namespace {

const geometry::ModelPtr kSphere = geometry::make_model(geometry::ModelKind::sphere_gradient);
const geometry::ModelPtr kGroup = geometry::make_model(geometry::ModelKind::rotation_group);

SolutionPath sample_path(const geometry::ModelPtr& model, int steps, std::uint64_t seed) {
  const TimeGrid grid = TimeGrid::make(1.0, steps);
  return sde::integrate(model, model->base_point(), sample_driver(grid, model->noise_dim(), seed, 0));
}

// Constant-speed driver along e_1 from the north pole: a great circle in the
// x-z plane.
SolutionPath great_circle(int steps, double speed) {
  const TimeGrid grid = TimeGrid::make(1.0, steps);
  BrownianDriver d = zero_driver(grid, 3);
  for (auto& inc : d.increments) inc[0] = speed * grid.dt();
  return sde::integrate(kSphere, kSphere->base_point(), d);
}

}  // namespace

TEST_CASE("frames stay orthonormal") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 1000, 3);
    const TransportFrame f = transport_frames(p);
    CHECK(f.steps() == p.steps());
    CHECK(isometry_defect(p, f) < 1e-10);
  }
}

TEST_CASE("damped translation on the sphere decays like exp(-t/2)") {
  const SolutionPath p = sample_path(kSphere, 1000, 8);
  const TransportFrame f = transport_frames(p);
  const Vec v0 = geometry::random_tangent(*kSphere, p.points[0], 2, 0);
  double worst = 0.0;
  for (int k = 0; k <= p.steps(); ++k) {
    const Vec w = damped_apply(p, f, k, v0);
    worst = std::max(worst, std::abs(w.norm() * std::exp(0.5 * p.grid().time(k)) / v0.norm() - 1.0));
    CHECK(kSphere->tangent_residual(p.points[k], w) < 1e-10);
  }
  CHECK(worst < 1e-8);
  CHECK((damped_apply(p, f, 0, v0) - v0).norm() < 1e-14);
}

TEST_CASE("parallel translation along a great circle is the rotation") {
  const double speed = 1.3;
  const SolutionPath p = great_circle(500, speed);
  const TransportFrame f = transport_frames(p);
  Vec along(3), across(3);
  along << 1, 0, 0;
  across << 0, 1, 0;
  for (int k = 0; k <= p.steps(); k += 50) {
    const Vec& x = p.points[k];
    CHECK(std::abs(x[1]) < 1e-14);
    const double th = std::atan2(x[0], x[2]);
    Vec rotated(3);
    rotated << std::cos(th), 0.0, -std::sin(th);
    CHECK((parallel_apply(p, f, k, along) - rotated).norm() < 1e-10);
    CHECK((parallel_apply(p, f, k, across) - across).norm() < 1e-10);
  }
}

TEST_CASE("on the group damped translation is adjoint translation") {
  const SolutionPath p = sample_path(kGroup, 400, 12);
  const TransportFrame f = transport_frames(p);
  const Vec v0 = geometry::random_tangent(*kGroup, p.points[0], 1, 0);
  for (int k = 0; k <= p.steps(); k += 40) {
    CHECK((f.damping[k] - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    // Right translation: v0 g_0^T g_k.
    const Mat3 expected = geometry::as_mat3(v0) * geometry::as_mat3(p.points[0]).transpose() * geometry::as_mat3(p.points[k]);
    CHECK((damped_apply(p, f, k, v0) - geometry::from_mat3(expected)).norm() < 1e-10);
  }
}

TEST_CASE("script W and the damped time derivative are inverse") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 1000, 6);
    const TransportFrame f = transport_frames(p);
    const int n = model->intrinsic_dim();
    std::vector<Vec> u(p.steps() + 1);
    for (int k = 0; k <= p.steps(); ++k) {
      const double t = p.grid().time(k);
      Vec c(n);
      for (int i = 0; i < n; ++i) c[i] = std::sin(t + i) + 0.5 * std::cos(2.0 * t * (i + 1));
      u[k] = damped_from_coords(f, k, c);
    }
    const PathVectorField v = script_W(p, f, u);
    CHECK(v.values[0].norm() == 0.0);
    const std::vector<Vec> back = covariant_time_derivative(p, f, v);
    double worst = 0.0;
    for (int k = 0; k <= p.steps(); ++k) worst = std::max(worst, (back[k] - u[k]).norm());
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("short paths are rejected by the time derivative") {
  const SolutionPath p = sample_path(kSphere, 3, 1);
  const TransportFrame f = transport_frames(p);
  PathVectorField v{std::vector<Vec>(4, Vec::Zero(3))};
  CHECK_THROWS_AS(covariant_time_derivative(p, f, v), Error);
}
