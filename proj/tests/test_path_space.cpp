#include <doctest.h>

#include "pathspace/path_space.hpp"

#include <cmath>

using namespace pathspace;
using namespace pathspace::paths;

namespace {

const geometry::ModelPtr kSphere = geometry::make_model(geometry::ModelKind::sphere_gradient);
const geometry::ModelPtr kGroup = geometry::make_model(geometry::ModelKind::rotation_group);

SolutionPath sample_path(const geometry::ModelPtr& model, int steps, std::uint64_t seed) {
  const TimeGrid grid = TimeGrid::make(1.0, steps);
  return sde::integrate(model, model->base_point(), sample_driver(grid, model->noise_dim(), seed, 0));
}

CameronMartinVector direction(const TimeGrid& grid, int dim) {
  return CameronMartinVector::from_slope(grid, [=](double t) {
    Vec s(dim);
    for (int i = 0; i < dim; ++i) s[i] = 1.0 + std::sin(2.0 * t + i);
    return s;
  });
}

double cm_inner(const CameronMartinVector& a, const CameronMartinVector& b) {
  double s = 0.0;
  for (int k = 0; k < a.steps(); ++k) s += a.slopes[k].dot(b.slopes[k]);
  return s * a.dt;
}

}  // namespace

TEST_CASE("xbar and ybar") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 400, 2);
    const TransportFrame f = transport::transport_frames(p);
    const CameronMartinVector h = direction(p.grid(), model->noise_dim());
    const BismutTangent v = xbar(p, f, h);

    // ybar o xbar = K^perp.
    const CameronMartinVector back = ybar(p, v), rel = relevant_part(p, h);
    double diff = 0.0;
    for (int k = 0; k < h.steps(); ++k) diff = std::max(diff, (back.slopes[k] - rel.slopes[k]).norm());
    CHECK(diff < 1e-12);

    // ybar is an isometry and xbar o ybar = id.
    CHECK(std::abs(back.norm_squared() - h_norm_squared(p, v)) < 1e-10);
    const BismutTangent again = xbar(p, f, back);
    double field = 0.0;
    for (std::size_t k = 0; k < v.field.values.size(); ++k)
      field = std::max(field, (again.field.values[k] - v.field.values[k]).norm());
    CHECK(field < 1e-12);

    // xbar is a contraction, strict on the sphere where K h != 0.
    CHECK(h_norm_squared(p, v) <= h.norm_squared() + 1e-12);
    if (model == kSphere) CHECK(h_norm_squared(p, v) < h.norm_squared() - 1e-3);
    CHECK(std::abs(cm_inner(rel, h) - rel.norm_squared()) < 1e-10);
  }
}

TEST_CASE("the trapezoid form agrees with the direct pairing") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 300, 7);
    const TransportFrame f = transport::transport_frames(p);
    std::vector<Vec> alpha(p.steps() + 1);
    Vec c(model->ambient_dim());
    for (int i = 0; i < c.size(); ++i) c[i] = 0.3 * i - 0.7;
    for (int k = 0; k <= p.steps(); ++k) alpha[k] = model->tangent_part(p.points[k], c * std::cos(p.grid().time(k)));
    const HOneForm phi = form_from_density(p, f, alpha);
    const BismutTangent v = xbar(p, f, direction(p.grid(), model->noise_dim()));
    const double direct = direct_pairing(p, alpha, v.field);
    CHECK(std::abs(phi(p, v) - direct) < 1e-12 * std::max(1.0, std::abs(direct)));
    CHECK(std::abs(direct) > 1e-3);
  }
}

TEST_CASE("cylindrical differential matches finite differences") {
  const SolutionPath p = sample_path(kSphere, 1000, 11);
  Vec a(3), b(3);
  a << 0.2, -0.4, 0.9;
  b << 1.0, 0.5, -0.3;
  const CylindricalFunction f = CylindricalFunction::make(
      p.grid(), {0.5, 1.0},
      [=](std::span<const Vec> xs) { return a.dot(xs[0]) * b.dot(xs[1]); },
      [=](std::span<const Vec> xs) { return std::vector<Vec>{a * b.dot(xs[1]), b * a.dot(xs[0])}; });
  const CameronMartinVector h = direction(p.grid(), 3);
  const double analytic = cylindrical_dH(f, p, sde::bismut_derivative(p, h));
  const double eps = 1e-5;
  const double fd = (f(sde::integrate(kSphere, p.points[0], shifted(p.driver, h, eps))) -
                     f(sde::integrate(kSphere, p.points[0], shifted(p.driver, h, -eps)))) /
                    (2 * eps);
  CHECK(std::abs(analytic - fd) < 1e-6);
  CHECK_THROWS_AS(CylindricalFunction::make(p.grid(), {0.5, 0.5}, f.g, f.grad), Error);
}

TEST_CASE("pull-back on the group is the form applied to xbar") {
  const SolutionPath p = sample_path(kGroup, 200, 5);
  const TransportFrame f = transport::transport_frames(p);
  const NoiseSplit s = sde::decompose_noise(p);
  const CameronMartinVector h = direction(p.grid(), 3);
  std::vector<Vec> alpha(p.steps() + 1);
  for (int k = 0; k <= p.steps(); ++k) alpha[k] = kGroup->diffusion(p.points[k]) * Vec::Ones(3);
  const HOneForm phi = form_from_density(p, f, alpha);
  const double pulled = pullback_one_form(p, s, phi, h, sde::bismut_derivative(p, h));
  CHECK(std::abs(pulled - phi(p, xbar(p, f, h))) < 1e-12);
}
