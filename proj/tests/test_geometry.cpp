#include <doctest.h>

#include "pathspace/geometry.hpp"
#include "pathspace/oracles.hpp"

using namespace pathspace;
using namespace pathspace::geometry;

namespace {

const SphereGradient kSphere;
const RotationGroup kGroup;

Vec v3(double a, double b, double c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("X Y is the identity on tangent vectors") {
  for (const Manifold* model : {static_cast<const Manifold*>(&kSphere), static_cast<const Manifold*>(&kGroup)}) {
    for (int i = 0; i < 50; ++i) {
      const Vec x = random_point(*model, 7, i);
      const Vec v = random_tangent(*model, x, 7, i);
      CHECK((model->diffusion(x) * model->right_inverse(x, v) - v).norm() < 1e-10);
      const Mat kp = model->relevant_projection(x);
      CHECK(max_abs(kp * kp - kp) < 1e-12);
      CHECK(max_abs(kp - kp.transpose()) < 1e-15);
      // Y v is orthogonal to ker X.
      CHECK((model->redundant_projection(x) * model->right_inverse(x, v)).norm() < 1e-12);
    }
  }
}

TEST_CASE("sphere relevant projection assembled from diffusion columns") {
  for (int i = 0; i < 20; ++i) {
    const Vec x = random_point(kSphere, 3, i);
    Mat assembled(3, 3);
    for (int j = 0; j < 3; ++j) assembled.col(j) = diffusion_map(kSphere, x, Vec::Unit(3, j));
    const Mat expected = Mat::Identity(3, 3) - x * x.transpose();
    CHECK(max_abs(assembled - expected) < 1e-15);
    CHECK(max_abs(kSphere.relevant_projection(x) - expected) < 1e-15);
  }
}

TEST_CASE("diffusion map edge cases") {
  CHECK(diffusion_map(kSphere, v3(1, 0, 0), v3(1, 0, 0)).norm() == 0.0);
  CHECK(right_inverse(kSphere, v3(0, 0, 1), v3(0, 0, 0)).norm() == 0.0);
  CHECK_THROWS_AS(diffusion_map(kSphere, v3(1, 1, 0), v3(1, 0, 0)), Error);
  CHECK_THROWS_AS(right_inverse(kSphere, v3(0, 0, 1), v3(0, 0, 1)), Error);
}

TEST_CASE("group diffusion is the pushforward of left translation") {
  for (int i = 0; i < 20; ++i) {
    const Vec g = random_point(kGroup, 11, i);
    const Vec e = random_noise(kGroup, 11, i);
    const double s = 1e-5;
    const Vec3 w(e[0], e[1], e[2]);
    const Mat3 fd = (as_mat3(g) * so3_exp(s * w) - as_mat3(g) * so3_exp(-s * w)) / (2 * s);
    CHECK((diffusion_map(kGroup, g, e) - from_mat3(fd)).norm() < 1e-9);
  }
}

TEST_CASE("LW connection: worked example and defining property") {
  const Vec x = v3(0, 0, 1), e = v3(0, 0, 1), v = v3(1, 0, 0);
  const Field Xe = [&](const Vec& y) -> Vec { return kSphere.diffusion(y) * e; };
  CHECK((lw_covariant_derivative(kSphere, x, v, Xe) - v3(-1, 0, 0)).norm() < 1e-6);
  CHECK((kSphere.nabla_diffusion(x, v, e) - v3(-1, 0, 0)).norm() < 1e-15);
  CHECK(lw_covariant_derivative(kSphere, x, v3(0, 0, 0), Xe).norm() == 0.0);
  CHECK_THROWS_AS(lw_covariant_derivative(kSphere, x, v, Xe, 0.0), Error);

  for (int i = 0; i < 100; ++i) {
    const Vec y = random_point(kSphere, 5, i);
    const Vec t = random_tangent(kSphere, y, 5, i);
    const Vec f = kSphere.relevant_projection(y) * random_noise(kSphere, 5, i);
    const Field Xf = [&](const Vec& z) -> Vec { return kSphere.diffusion(z) * f; };
    CHECK(lw_covariant_derivative(kSphere, y, t, Xf).norm() < 1e-6);
    CHECK(kSphere.nabla_diffusion(y, t, f).norm() < 1e-14);
  }
}

TEST_CASE("analytic derivatives match their finite-difference twins") {
  for (const Manifold* model : {static_cast<const Manifold*>(&kSphere), static_cast<const Manifold*>(&kGroup)}) {
    for (int i = 0; i < 30; ++i) {
      const Vec x = random_point(*model, 9, i);
      const Vec v = random_tangent(*model, x, 9, i);
      CHECK(max_abs(model->diffusion_derivative(x, v) - fd_diffusion_derivative(*model, x, v)) < 1e-8);
      CHECK(max_abs(model->relevant_projection_derivative(x, v) -
                    fd_relevant_projection_derivative(*model, x, v)) < 1e-8);
      const Vec e = random_noise(*model, 9, i);
      const Field Xe = [&](const Vec& y) -> Vec { return model->diffusion(y) * e; };
      CHECK((model->nabla_diffusion(x, v, e) - lw_covariant_derivative(*model, x, v, Xe)).norm() < 1e-7);
    }
  }
}

TEST_CASE("step Jacobians match finite differences") {
  for (const Manifold* model : {static_cast<const Manifold*>(&kSphere), static_cast<const Manifold*>(&kGroup)}) {
    for (int i = 0; i < 30; ++i) {
      const Vec x = random_point(*model, 13, i);
      const Vec b = random_noise(*model, 13, i) * 0.1;
      const StepJacobians an = model->step_jacobians(x, b, 0.01);
      const StepJacobians fd = fd_step_jacobians(*model, x, b, 0.01);
      const Mat basis = model->tangent_basis(x);
      CHECK(max_abs(an.wrt_point * basis - fd.wrt_point) < 1e-8);
      CHECK(max_abs(an.wrt_noise - fd.wrt_noise) < 1e-8);
    }
  }
}

TEST_CASE("Ricci operator against the double finite-difference curvature trace") {
  for (int i = 0; i < 10; ++i) {
    const Vec x = random_point(kSphere, 17, i);
    const Vec v = random_tangent(kSphere, x, 17, i);
    CHECK((ricci_sharp_fd(kSphere, x, v) - ricci_sharp(kSphere, x, v)).norm() < 1e-4);
    CHECK((ricci_sharp(kSphere, x, v) - v).norm() < 1e-15);
    const Vec g = random_point(kGroup, 17, i);
    const Vec w = random_tangent(kGroup, g, 17, i);
    CHECK(ricci_sharp(kGroup, g, w).norm() == 0.0);
    CHECK(ricci_sharp_fd(kGroup, g, w).norm() < 1e-4);
  }
}

TEST_CASE("the connection is metric") {
  for (const Manifold* model : {static_cast<const Manifold*>(&kSphere), static_cast<const Manifold*>(&kGroup)}) {
    for (int i = 0; i < 20; ++i) {
      const Vec x = random_point(*model, 19, i);
      const Vec v = random_tangent(*model, x, 19, i);
      const Vec u = random_tangent(*model, x, 190, i);
      const Vec w = random_tangent(*model, x, 1900, i);
      CHECK(metric_defect_fd(*model, x, v, u, w) < 1e-5);
    }
  }
}

TEST_CASE("retraction and frames") {
  for (int i = 0; i < 20; ++i) {
    const Vec g = random_point(kGroup, 23, i);
    const Vec y = g + 1e-3 * random_noise(kSphere, 23, i).replicate(3, 1);
    CHECK(kGroup.constraint_residual(kGroup.retract(y)) < 1e-12);
    CHECK(kGroup.constraint_residual(g) < 1e-12);
    const Vec x = random_point(kSphere, 23, i);
    CHECK(kSphere.constraint_residual(kSphere.retract(2.5 * x)) < 1e-15);

    const Mat basis = kSphere.tangent_basis(x);
    CHECK(max_abs(basis.transpose() * basis - Mat::Identity(2, 2)) < 1e-14);
    CHECK((basis.transpose() * x).norm() < 1e-14);
    const Vec x2 = kSphere.step(x, 0.1 * random_noise(kSphere, 29, i), 0.01);
    const Mat moved = kSphere.transport_frame(x, x2, basis);
    CHECK(max_abs(moved.transpose() * moved - Mat::Identity(2, 2)) < 1e-14);
    CHECK((moved.transpose() * x2).norm() < 1e-14);
  }
}

TEST_CASE("so(3) right Jacobian") {
  const Vec3 w(0.3, -1.1, 0.7), dw(1e-6, 2e-6, -1.5e-6);
  const Mat3 lhs = so3_exp(w + dw);
  const Mat3 rhs = so3_exp(w) * so3_exp(so3_right_jacobian(w) * dw);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((vee(hat(w)) - w).norm() == 0.0);
}
