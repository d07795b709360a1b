#include <doctest.h>

#include "pathspace/sde.hpp"
#include "pathspace/transport.hpp"

#include <cmath>

using namespace pathspace;
using namespace pathspace::sde;

namespace {

const geometry::ModelPtr kSphere = geometry::make_model(geometry::ModelKind::sphere_gradient);
const geometry::ModelPtr kGroup = geometry::make_model(geometry::ModelKind::rotation_group);

SolutionPath sample_path(const geometry::ModelPtr& model, int steps, std::uint64_t seed, std::uint64_t index) {
  const TimeGrid grid = TimeGrid::make(1.0, steps);
  return integrate(model, model->base_point(), sample_driver(grid, model->noise_dim(), seed, index));
}

CameronMartinVector wavy(const TimeGrid& grid, int dim, double phase) {
  return CameronMartinVector::from_slope(grid, [=](double t) {
    Vec s(dim);
    for (int i = 0; i < dim; ++i) s[i] = std::cos(3.0 * t + phase + i);
    return s;
  });
}

double sup_distance(const PathVectorField& a, const PathVectorField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) m = std::max(m, (a.values[k] - b.values[k]).norm());
  return m;
}

}  // namespace

TEST_CASE("zero driver leaves the base point fixed") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = integrate(model, model->base_point(), zero_driver(TimeGrid::make(1.0, 50), model->noise_dim()));
    for (const Vec& x : p.points) CHECK((x - model->base_point()).norm() < 1e-15);
  }
}

TEST_CASE("paths stay on the manifold and the streaming integrator agrees") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 2000, 17, 3);
    double worst = 0.0;
    for (const Vec& x : p.points) worst = std::max(worst, model->constraint_residual(x));
    CHECK(worst < 1e-12);
    const Vec last = integrate_terminal(*model, model->base_point(), p.grid(), 17, 3);
    CHECK((last - p.points.back()).norm() == 0.0);
  }
}

TEST_CASE("integrate rejects bad input") {
  Vec off(3);
  off << 1.0, 1.0, 0.0;
  const BrownianDriver d = zero_driver(TimeGrid::make(1.0, 10), 3);
  CHECK_THROWS_AS(integrate(kSphere, off, d), Error);
  CHECK_THROWS_AS(integrate(kSphere, kSphere->base_point(), zero_driver(TimeGrid::make(1.0, 10), 2)), Error);
}

TEST_CASE("the Bismut derivative is linear and matches finite differences of the Ito map") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 500, 5, 1);
    const int m = model->noise_dim();
    const CameronMartinVector h1 = wavy(p.grid(), m, 0.0), h2 = wavy(p.grid(), m, 1.3);
    CameronMartinVector mix = h1.scaled(2.0);
    for (int k = 0; k < mix.steps(); ++k) mix.slopes[k] += h2.slopes[k];
    const PathVectorField v1 = bismut_derivative(p, h1), v2 = bismut_derivative(p, h2);
    const PathVectorField vm = bismut_derivative(p, mix);
    double lin = 0.0;
    for (std::size_t k = 0; k < vm.values.size(); ++k)
      lin = std::max(lin, (vm.values[k] - 2.0 * v1.values[k] - v2.values[k]).norm());
    CHECK(lin < 1e-12);
    CHECK(v1.values[0].norm() == 0.0);
    CHECK(sup_distance(v1, ito_map_fd(p, h1)) < 1e-6);
    for (std::size_t k = 0; k < v1.values.size(); ++k)
      CHECK(model->tangent_residual(p.points[k], v1.values[k]) < 1e-10);
  }
}

TEST_CASE("noise split recombines to the driver") {
  const SolutionPath p = sample_path(kSphere, 1000, 9, 2);
  const NoiseSplit s = decompose_noise(p);
  REQUIRE(s.redundant_dim == 1);
  const Vec x0 = p.points[0];
  const Mat k0 = kSphere->redundant_projection(x0);
  double recombine = 0.0, orth = 0.0, kernel = 0.0;
  for (int k = 0; k < p.steps(); ++k) {
    recombine = std::max(recombine, (s.frames[k] * (s.relevant[k] + s.redundant[k]) - p.driver.increments[k]).norm());
    orth = std::max(orth, (s.frames[k].transpose() * s.frames[k] - Mat::Identity(3, 3)).cwiseAbs().maxCoeff());
    kernel = std::max(kernel, (k0 * s.relevant[k]).norm() + (s.redundant[k] - k0 * s.redundant[k]).norm());
    // tpar_k carries ker X(x_0) onto ker X(x_k).
    const Mat moved = s.frames[k] * k0 * s.frames[k].transpose();
    CHECK((moved - kSphere->redundant_projection(p.points[k])).cwiseAbs().maxCoeff() < 1e-8);
  }
  CHECK(recombine < 1e-12);
  CHECK(orth < 1e-12);
  CHECK(kernel < 1e-12);
}

TEST_CASE("reconstruction reproduces the path") {
  const SolutionPath p = sample_path(kSphere, 1000, 21, 0);
  const NoiseSplit s = decompose_noise(p);
  const Resampled same = reconstruct_driver(p, s, s.redundant);
  CHECK(same.max_deviation < 1e-10);
  for (int k = 0; k < p.steps(); ++k)
    CHECK((same.path.driver.increments[k] - p.driver.increments[k]).norm() < 1e-10);
  for (int i = 0; i < 4; ++i) {
    const Resampled r = reconstruct_driver(p, s, fresh_redundant(p, i));
    CHECK(r.max_deviation < 1e-9);
    CHECK(r.max_deviation <= 10.0 * p.grid().dt());
  }
  std::vector<Vec> wrong = s.redundant;
  wrong.pop_back();
  CHECK_THROWS_AS(reconstruct_driver(p, s, wrong), Error);
}

TEST_CASE("rotation group has no redundant noise") {
  const SolutionPath p = sample_path(kGroup, 200, 4, 0);
  const NoiseSplit s = decompose_noise(p);
  CHECK(s.redundant_dim == 0);
  for (int k = 0; k < p.steps(); ++k) CHECK((s.relevant[k] - p.driver.increments[k]).norm() < 1e-14);
  const Resampled r = reconstruct_driver(p, s, fresh_redundant(p, 0));
  CHECK(r.max_deviation < 1e-12);
}

TEST_CASE("covariant route approaches the Bismut derivative") {
  for (const auto& model : {kSphere, kGroup}) {
    const SolutionPath p = sample_path(model, 4000, 33, 0);
    const CameronMartinVector h = wavy(p.grid(), model->noise_dim(), 0.4);
    const NoiseSplit s = decompose_noise(p);
    const transport::TransportFrame f = transport::transport_frames(p);
    const double err = sup_distance(covariant_derivative_path(p, s, f, h), bismut_derivative(p, h));
    CHECK(err < (model == kGroup ? 10.0 * p.grid().dt() : 2e-2));
  }
}
