#include "pathspace/geometry.hpp"

#include "pathspace/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace pathspace::geometry {

namespace {

// M (M^T M)^{-1/2} for a d x n matrix of full column rank.
Mat polar_factor(const Mat& m) {
  const Mat gram = m.transpose() * m;
  if (gram.rows() == 2) {
    // sqrt(G) = (G + s I) / t with s = sqrt(det G), t = sqrt(tr G + 2 s).
    const double s = std::sqrt(gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0));
    const double t = std::sqrt(gram(0, 0) + gram(1, 1) + 2.0 * s);
    Mat root(2, 2);
    const double a = (gram(0, 0) + s) / t, b = gram(0, 1) / t, d = (gram(1, 1) + s) / t;
    const double det = a * d - b * b;
    root << d / det, -b / det, -b / det, a / det;
    return m * root;
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const Vec inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  const Mat root = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  return m * root;
}

Mat3 skew_part(const Mat3& a) { return 0.5 * (a - a.transpose()); }

}  // namespace

Vec Manifold::frame_coords(const Vec& x, const Mat& frame, const Vec& v) const {
  Vec c(frame.cols());
  for (int i = 0; i < frame.cols(); ++i) c[i] = inner(x, frame.col(i), v);
  return c;
}

// ---------------------------------------------------------------------------
// Sphere

SphereGradient::SphereGradient(int n) : Manifold(n, n + 1, n + 1) {
  if (n < 1 || n + 1 > kMaxDim) fail(ErrorCode::invalid_argument, "sphere dimension out of range");
}

std::string SphereGradient::name() const { return "sphere-" + std::to_string(intrinsic_dim()); }

Vec SphereGradient::base_point() const {
  Vec x = Vec::Zero(ambient_dim());
  x[ambient_dim() - 1] = 1.0;
  return x;
}

double SphereGradient::constraint_residual(const Vec& x) const {
  if (x.size() != ambient_dim()) return INFINITY;
  return std::abs(x.norm() - 1.0);
}

Vec SphereGradient::retract(const Vec& y) const { return y / y.norm(); }

double SphereGradient::tangent_residual(const Vec& x, const Vec& v) const {
  if (v.size() != ambient_dim()) return INFINITY;
  return std::abs(x.dot(v));
}

Vec SphereGradient::tangent_part(const Vec& x, const Vec& v) const { return v - x * x.dot(v); }

double SphereGradient::inner(const Vec&, const Vec& u, const Vec& v) const { return u.dot(v); }

Mat SphereGradient::tangent_basis(const Vec& x) const {
  const int d = ambient_dim();
  Mat column = x;
  Eigen::HouseholderQR<Mat> qr(column);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - 1);
}

Mat SphereGradient::diffusion(const Vec& x) const {
  const int d = ambient_dim();
  return Mat::Identity(d, d) - x * x.transpose();
}

Mat SphereGradient::diffusion_derivative(const Vec& x, const Vec& v) const {
  return -(v * x.transpose() + x * v.transpose());
}

Vec SphereGradient::right_inverse(const Vec& x, const Vec& v) const { return tangent_part(x, v); }

Mat SphereGradient::relevant_projection(const Vec& x) const { return diffusion(x); }

Mat SphereGradient::relevant_projection_derivative(const Vec& x, const Vec& v) const {
  return diffusion_derivative(x, v);
}

Vec SphereGradient::drift(const Vec&) const { return Vec::Zero(ambient_dim()); }

Vec SphereGradient::nabla_drift(const Vec&, const Vec&) const { return Vec::Zero(ambient_dim()); }

// P(x) dX(v) e = -<x,e> v for v tangent.
Vec SphereGradient::nabla_diffusion(const Vec& x, const Vec& v, const Vec& e) const {
  return -x.dot(e) * v;
}

Vec SphereGradient::ricci_sharp(const Vec& x, const Vec& v) const {
  return static_cast<double>(intrinsic_dim() - 1) * tangent_part(x, v);
}

Vec SphereGradient::curve(const Vec& x, const Vec& v, double s) const {
  const Vec y = x + s * v;
  return y / y.norm();
}

Field SphereGradient::extend(const Vec&, const Vec& u) const {
  return [u](const Vec& y) -> Vec { return u - y * y.dot(u); };
}

// Heun step driven by the relevant part r = K^perp(x) b of the increment.
// Predictor x + X(x) r, corrector averaging X at both ends, then radial
// retraction. X(x~) uses the ambient formula I - x~ x~^T off the sphere.
Vec SphereGradient::step(const Vec& x, const Vec& b, double) const {
  const Vec r = b - x * x.dot(b);
  const Vec p = r - x * x.dot(r);
  const Vec xt = x + p;
  const Vec q = r - xt * xt.dot(r);
  const Vec y = x + 0.5 * (p + q);
  return y / y.norm();
}

StepJacobians SphereGradient::step_jacobians(const Vec& x, const Vec& b, double) const {
  const int d = ambient_dim();
  const Vec r = b - x * x.dot(b);
  const Vec p = r - x * x.dot(r);
  const Vec xt = x + p;
  const Vec q = r - xt * xt.dot(r);
  const Vec y = x + 0.5 * (p + q);
  const double ny = y.norm();
  const Vec xn = y / ny;
  const double xb = x.dot(b), xr = x.dot(r), xtr = xt.dot(r);

  auto finish = [&](const Vec& dy) -> Vec { return (dy - xn * xn.dot(dy)) / ny; };

  StepJacobians jac{Mat(d, d), Mat(d, d)};
  for (int i = 0; i < d; ++i) {
    const Vec v = Vec::Unit(d, i);
    const Vec dr = -v * xb - x * v.dot(b);
    const Vec dp = dr - v * xr - x * (v.dot(r) + x.dot(dr));
    const Vec dxt = v + dp;
    const Vec dq = dr - dxt * xtr - xt * (dxt.dot(r) + xt.dot(dr));
    jac.wrt_point.col(i) = finish(v + 0.5 * (dp + dq));
  }
  for (int i = 0; i < d; ++i) {
    const Vec db = Vec::Unit(d, i);
    const Vec dr = db - x * x.dot(db);
    const Vec dp = dr - x * x.dot(dr);
    const Vec dq = dr - dp * xtr - xt * (dp.dot(r) + xt.dot(dr));
    jac.wrt_noise.col(i) = finish(0.5 * (dp + dq));
  }
  return jac;
}

// Projection onto the new tangent space followed by polar
// re-orthonormalisation: for the sphere this is the minimal rotation taking
// `from` to `to`.
Mat SphereGradient::transport_frame(const Vec&, const Vec& to, const Mat& frame) const {
  const Mat projected = frame - to * (to.transpose() * frame);
  return polar_factor(projected);
}

// Levi-Civita is torsion free, so nabla' = nabla.
Mat SphereGradient::adjoint_transport_frame(const Vec& from, const Vec& to,
                                            const Mat& frame) const {
  return transport_frame(from, to, frame);
}

// ---------------------------------------------------------------------------
// SO(3) helpers

Mat3 hat(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0;
  return s;
}

Vec3 vee(const Mat3& s) {
  const Mat3 a = skew_part(s);
  return {a(2, 1), a(0, 2), a(1, 0)};
}

Mat3 so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-8) return Mat3::Identity() + k + 0.5 * k * k;
  return Mat3::Identity() + (std::sin(theta) / theta) * k +
         ((1.0 - std::cos(theta)) / (theta * theta)) * k * k;
}

Mat3 so3_right_jacobian(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-6) return Mat3::Identity() - 0.5 * k + (1.0 / 6.0) * k * k;
  const double t2 = theta * theta;
  return Mat3::Identity() - ((1.0 - std::cos(theta)) / t2) * k +
         ((theta - std::sin(theta)) / (t2 * theta)) * k * k;
}

Mat3 as_mat3(const Vec& x) { return Eigen::Map<const Mat3>(x.data()); }

Vec from_mat3(const Mat3& g) {
  Vec x(9);
  Eigen::Map<Mat3>(x.data()) = g;
  return x;
}

// ---------------------------------------------------------------------------
// Rotation group

RotationGroup::RotationGroup() : Manifold(3, 3, 9) {}

Vec RotationGroup::base_point() const { return from_mat3(Mat3::Identity()); }

double RotationGroup::constraint_residual(const Vec& x) const {
  if (x.size() != 9) return INFINITY;
  const Mat3 g = as_mat3(x);
  const double orth = (g.transpose() * g - Mat3::Identity()).cwiseAbs().maxCoeff();
  return g.determinant() > 0.0 ? orth : INFINITY;
}

Vec RotationGroup::retract(const Vec& y) const {
  Eigen::JacobiSVD<Mat3> svd(as_mat3(y), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return from_mat3(r);
}

double RotationGroup::tangent_residual(const Vec& x, const Vec& v) const {
  if (v.size() != 9) return INFINITY;
  const Mat3 s = as_mat3(x).transpose() * as_mat3(v);
  return (s + s.transpose()).cwiseAbs().maxCoeff();
}

Vec RotationGroup::tangent_part(const Vec& x, const Vec& v) const {
  const Mat3 g = as_mat3(x);
  return from_mat3(g * skew_part(g.transpose() * as_mat3(v)));
}

double RotationGroup::inner(const Vec&, const Vec& u, const Vec& v) const {
  return 0.5 * u.dot(v);
}

Mat RotationGroup::tangent_basis(const Vec& x) const { return diffusion(x); }

Mat RotationGroup::diffusion(const Vec& x) const {
  const Mat3 g = as_mat3(x);
  Mat out(9, 3);
  for (int i = 0; i < 3; ++i) out.col(i) = from_mat3(g * hat(Vec3::Unit(i)));
  return out;
}

Mat RotationGroup::diffusion_derivative(const Vec&, const Vec& v) const {
  const Mat3 dv = as_mat3(v);
  Mat out(9, 3);
  for (int i = 0; i < 3; ++i) out.col(i) = from_mat3(dv * hat(Vec3::Unit(i)));
  return out;
}

Vec RotationGroup::right_inverse(const Vec& x, const Vec& v) const {
  const Vec3 w = vee(as_mat3(x).transpose() * as_mat3(v));
  return Vec(w);
}

Mat RotationGroup::relevant_projection(const Vec&) const { return Mat::Identity(3, 3); }

Mat RotationGroup::relevant_projection_derivative(const Vec&, const Vec&) const {
  return Mat::Zero(3, 3);
}

Vec RotationGroup::drift(const Vec&) const { return Vec::Zero(9); }

Vec RotationGroup::nabla_drift(const Vec&, const Vec&) const { return Vec::Zero(9); }

// Y(X^e) = e is constant, so X^e is parallel.
Vec RotationGroup::nabla_diffusion(const Vec&, const Vec&, const Vec&) const {
  return Vec::Zero(9);
}

Vec RotationGroup::ricci_sharp(const Vec&, const Vec&) const { return Vec::Zero(9); }

Vec RotationGroup::curve(const Vec& x, const Vec& v, double s) const {
  const Mat3 g = as_mat3(x);
  const Vec3 w = vee(g.transpose() * as_mat3(v));
  return from_mat3(g * so3_exp(s * w));
}

Field RotationGroup::extend(const Vec& x, const Vec& u) const {
  const Mat3 body = skew_part(as_mat3(x).transpose() * as_mat3(u));
  return [body](const Vec& y) -> Vec { return from_mat3(as_mat3(y) * body); };
}

// g exp(hat(b)), then one Newton-Schulz polish against roundoff drift. The
// polish is the identity to first order on tangent directions.
Vec RotationGroup::step(const Vec& x, const Vec& b, double) const {
  const Mat3 g = as_mat3(x) * so3_exp(Vec3(b[0], b[1], b[2]));
  return from_mat3(0.5 * g * (3.0 * Mat3::Identity() - g.transpose() * g));
}

StepJacobians RotationGroup::step_jacobians(const Vec& x, const Vec& b, double) const {
  const Vec3 w(b[0], b[1], b[2]);
  const Mat3 rot = so3_exp(w);
  const Mat3 next = as_mat3(x) * rot;
  const Mat3 jr = so3_right_jacobian(w);
  StepJacobians jac{Mat(9, 9), Mat(9, 3)};
  for (int i = 0; i < 9; ++i) {
    Vec e = Vec::Unit(9, i);
    jac.wrt_point.col(i) = from_mat3(as_mat3(e) * rot);
  }
  for (int i = 0; i < 3; ++i) jac.wrt_noise.col(i) = from_mat3(next * hat(jr.col(i)));
  return jac;
}

// Left invariant fields are parallel: v -> g_to g_from^T v.
Mat RotationGroup::transport_frame(const Vec& from, const Vec& to, const Mat& frame) const {
  const Mat3 shift = as_mat3(to) * as_mat3(from).transpose();
  Mat out(9, frame.cols());
  for (int j = 0; j < frame.cols(); ++j) out.col(j) = from_mat3(shift * as_mat3(frame.col(j)));
  return out;
}

// Right invariant fields are nabla'-parallel: v -> v g_from^T g_to.
Mat RotationGroup::adjoint_transport_frame(const Vec& from, const Vec& to,
                                           const Mat& frame) const {
  const Mat3 shift = as_mat3(from).transpose() * as_mat3(to);
  Mat out(9, frame.cols());
  for (int j = 0; j < frame.cols(); ++j) out.col(j) = from_mat3(as_mat3(frame.col(j)) * shift);
  return out;
}

// ---------------------------------------------------------------------------

ModelPtr make_model(ModelKind kind) {
  switch (kind) {
    case ModelKind::sphere_gradient:
      return std::make_shared<SphereGradient>(2);
    case ModelKind::rotation_group:
      return std::make_shared<RotationGroup>();
  }
  fail(ErrorCode::invalid_argument, "unknown model kind");
}

ModelKind parse_model(const std::string& name) {
  if (name == "sphere") return ModelKind::sphere_gradient;
  if (name == "group") return ModelKind::rotation_group;
  fail(ErrorCode::config, "unknown model '" + name + "' (expected sphere or group)");
}

void require_on_manifold(const Manifold& model, const Vec& x) {
  const double res = model.constraint_residual(x);
  if (!(res <= kConstraintTol))
    fail(ErrorCode::constraint_violation,
         "point violates the " + model.name() + " constraint (residual " + std::to_string(res) + ")");
}

void require_tangent(const Manifold& model, const Vec& x, const Vec& v) {
  const double res = model.tangent_residual(x, v);
  if (!(res <= kTangentTol))
    fail(ErrorCode::not_tangent, "vector is not tangent (residual " + std::to_string(res) + ")");
}

Vec diffusion_map(const Manifold& model, const Vec& x, const Vec& e) {
  require_on_manifold(model, x);
  if (e.size() != model.noise_dim()) fail(ErrorCode::invalid_argument, "noise vector has wrong size");
  return model.diffusion(x) * e;
}

Vec right_inverse(const Manifold& model, const Vec& x, const Vec& v) {
  require_on_manifold(model, x);
  require_tangent(model, x, v);
  return model.right_inverse(x, v);
}

Vec lw_covariant_derivative(const Manifold& model, const Vec& x, const Vec& v, const Field& U,
                            double step) {
  if (!(step > 0.0) || step * std::max(1.0, v.norm()) < 1e-12)
    fail(ErrorCode::numerical_failure, "finite-difference step underflow");
  const Vec fwd = model.curve(x, v, step);
  const Vec bwd = model.curve(x, v, -step);
  const Vec dy = (model.right_inverse(fwd, U(fwd)) - model.right_inverse(bwd, U(bwd))) / (2.0 * step);
  return model.diffusion(x) * dy;
}

Vec ricci_sharp(const Manifold& model, const Vec& x, const Vec& v) {
  require_tangent(model, x, v);
  return model.ricci_sharp(x, v);
}

Mat fd_diffusion_derivative(const Manifold& model, const Vec& x, const Vec& v, double step) {
  return (model.diffusion(model.curve(x, v, step)) - model.diffusion(model.curve(x, v, -step))) /
         (2.0 * step);
}

Mat fd_relevant_projection_derivative(const Manifold& model, const Vec& x, const Vec& v,
                                      double step) {
  return (model.relevant_projection(model.curve(x, v, step)) -
          model.relevant_projection(model.curve(x, v, -step))) /
         (2.0 * step);
}

// wrt_point is returned restricted to tangent_basis(x): column i is the
// derivative along basis vector i.
StepJacobians fd_step_jacobians(const Manifold& model, const Vec& x, const Vec& b, double dt,
                                double step) {
  const Mat basis = model.tangent_basis(x);
  const int d = model.ambient_dim(), m = model.noise_dim();
  StepJacobians jac{Mat(d, basis.cols()), Mat(d, m)};
  for (int i = 0; i < basis.cols(); ++i) {
    jac.wrt_point.col(i) = (model.step(model.curve(x, basis.col(i), step), b, dt) -
                            model.step(model.curve(x, basis.col(i), -step), b, dt)) /
                           (2.0 * step);
  }
  for (int i = 0; i < m; ++i) {
    const Vec e = Vec::Unit(m, i) * step;
    jac.wrt_noise.col(i) = (model.step(x, b + e, dt) - model.step(x, b - e, dt)) / (2.0 * step);
  }
  return jac;
}

Vec random_point(const Manifold& model, std::uint64_t seed, std::uint64_t index) {
  rng::Sampler s(seed, index);
  if (model.kind() == ModelKind::rotation_group) {
    const Vec3 w(s.normal(), s.normal(), s.normal());
    return from_mat3(so3_exp(w));
  }
  Vec y(model.ambient_dim());
  for (int i = 0; i < y.size(); ++i) y[i] = s.normal();
  return y / y.norm();
}

Vec random_tangent(const Manifold& model, const Vec& x, std::uint64_t seed, std::uint64_t index) {
  rng::Sampler s(seed, index ^ 0x5bd1e995ULL);
  const Mat basis = model.tangent_basis(x);
  Vec c(basis.cols());
  for (int i = 0; i < c.size(); ++i) c[i] = s.normal();
  return basis * c;
}

Vec random_noise(const Manifold& model, std::uint64_t seed, std::uint64_t index) {
  rng::Sampler s(seed, index ^ 0x27d4eb2fULL);
  Vec e(model.noise_dim());
  for (int i = 0; i < e.size(); ++i) e[i] = s.normal();
  return e;
}

}  // namespace pathspace::geometry
