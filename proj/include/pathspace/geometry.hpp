#pragma once

// Concrete manifold models carrying a diffusion map X: R^m x M -> TM, its
// right inverse Y, the kernel projections of X, the connection X induces on
// E = Image X, and its Ricci operator. Points and tangent vectors live in
// ambient coordinates: R^{n+1} for the sphere, flattened 3x3 matrices
// (column major) for the rotation group.

#include "pathspace/types.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

namespace pathspace::geometry {

enum class ModelKind { sphere_gradient, rotation_group };

/// A local section U of E, evaluable at points near the one it was built at.
using Field = std::function<Vec(const Vec&)>;

struct StepJacobians {
  Mat wrt_point;  // d x d, derivative of one integrator step in the point
  Mat wrt_noise;  // d x m, derivative in the Brownian increment
};

class Manifold {
 public:
  virtual ~Manifold() = default;

  virtual ModelKind kind() const noexcept = 0;
  virtual std::string name() const = 0;
  int intrinsic_dim() const noexcept { return n_; }
  int noise_dim() const noexcept { return m_; }
  int ambient_dim() const noexcept { return d_; }

  virtual Vec base_point() const = 0;
  virtual double constraint_residual(const Vec& x) const = 0;
  /// Nearest point of M to an ambient point close to M.
  virtual Vec retract(const Vec& y) const = 0;
  virtual double tangent_residual(const Vec& x, const Vec& v) const = 0;
  /// Orthogonal projection of an ambient vector onto T_xM.
  virtual Vec tangent_part(const Vec& x, const Vec& v) const = 0;
  /// Riemannian metric on T_xM (the one induced by X).
  virtual double inner(const Vec& x, const Vec& u, const Vec& v) const = 0;
  /// d x n matrix whose columns are an orthonormal basis of T_xM.
  virtual Mat tangent_basis(const Vec& x) const = 0;

  /// X(x) as a d x m matrix.
  virtual Mat diffusion(const Vec& x) const = 0;
  /// Ambient derivative dX(v), d x m.
  virtual Mat diffusion_derivative(const Vec& x, const Vec& v) const = 0;
  /// Y(x)v, the adjoint of X(x) applied to v in T_xM.
  virtual Vec right_inverse(const Vec& x, const Vec& v) const = 0;
  /// K^perp(x) = Y(x)X(x), projection of R^m onto (ker X(x))^perp.
  virtual Mat relevant_projection(const Vec& x) const = 0;
  virtual Mat relevant_projection_derivative(const Vec& x, const Vec& v) const = 0;
  Mat redundant_projection(const Vec& x) const {
    return Mat::Identity(m_, m_) - relevant_projection(x);
  }

  virtual Vec drift(const Vec& x) const = 0;
  /// Covariant derivative of the drift, nabla_v A.
  virtual Vec nabla_drift(const Vec& x, const Vec& v) const = 0;
  /// Closed form of nabla_v X^e for the induced connection.
  virtual Vec nabla_diffusion(const Vec& x, const Vec& v, const Vec& e) const = 0;
  virtual Vec ricci_sharp(const Vec& x, const Vec& v) const = 0;

  /// Curve on M with c(0) = x and c'(0) = v (v tangent).
  virtual Vec curve(const Vec& x, const Vec& v, double s) const = 0;
  /// Local vector field through u in T_xM used by the finite-difference oracles.
  virtual Field extend(const Vec& x, const Vec& u) const = 0;

  /// One step of the Stratonovich integrator.
  virtual Vec step(const Vec& x, const Vec& increment, double dt) const = 0;
  virtual StepJacobians step_jacobians(const Vec& x, const Vec& increment, double dt) const = 0;

  /// Moves an orthonormal frame (columns tangent at `from`) to `to` by one
  /// step of parallel translation for the induced connection.
  virtual Mat transport_frame(const Vec& from, const Vec& to, const Mat& frame) const = 0;
  /// Same for the adjoint connection nabla'.
  virtual Mat adjoint_transport_frame(const Vec& from, const Vec& to, const Mat& frame) const = 0;
  /// True when nabla' = nabla (torsion-free induced connection).
  virtual bool adjoint_is_parallel() const noexcept = 0;

  /// Coordinates of a tangent vector in an orthonormal frame at x.
  Vec frame_coords(const Vec& x, const Mat& frame, const Vec& v) const;

 protected:
  Manifold(int n, int m, int d) : n_(n), m_(m), d_(d) {}

 private:
  int n_;
  int m_;
  int d_;
};

/// Unit sphere S^n in R^{n+1} with the gradient system X(x)e = e - <x,e>x.
/// Induces the Levi-Civita connection; Ric# = (n-1) id; no drift.
class SphereGradient final : public Manifold {
 public:
  explicit SphereGradient(int n = 2);

  ModelKind kind() const noexcept override { return ModelKind::sphere_gradient; }
  std::string name() const override;
  Vec base_point() const override;
  double constraint_residual(const Vec& x) const override;
  Vec retract(const Vec& y) const override;
  double tangent_residual(const Vec& x, const Vec& v) const override;
  Vec tangent_part(const Vec& x, const Vec& v) const override;
  double inner(const Vec& x, const Vec& u, const Vec& v) const override;
  Mat tangent_basis(const Vec& x) const override;
  Mat diffusion(const Vec& x) const override;
  Mat diffusion_derivative(const Vec& x, const Vec& v) const override;
  Vec right_inverse(const Vec& x, const Vec& v) const override;
  Mat relevant_projection(const Vec& x) const override;
  Mat relevant_projection_derivative(const Vec& x, const Vec& v) const override;
  Vec drift(const Vec& x) const override;
  Vec nabla_drift(const Vec& x, const Vec& v) const override;
  Vec nabla_diffusion(const Vec& x, const Vec& v, const Vec& e) const override;
  Vec ricci_sharp(const Vec& x, const Vec& v) const override;
  Vec curve(const Vec& x, const Vec& v, double s) const override;
  Field extend(const Vec& x, const Vec& u) const override;
  Vec step(const Vec& x, const Vec& increment, double dt) const override;
  StepJacobians step_jacobians(const Vec& x, const Vec& increment, double dt) const override;
  Mat transport_frame(const Vec& from, const Vec& to, const Mat& frame) const override;
  Mat adjoint_transport_frame(const Vec& from, const Vec& to, const Mat& frame) const override;
  bool adjoint_is_parallel() const noexcept override { return true; }
};

/// SO(3) with the left invariant system X(g)e = g hat(e) and metric
/// <u,v> = tr(u^T v)/2, for which X(g) is an isometry. Induces the flat left
/// invariant connection; its adjoint is the flat right invariant one.
class RotationGroup final : public Manifold {
 public:
  RotationGroup();

  ModelKind kind() const noexcept override { return ModelKind::rotation_group; }
  std::string name() const override { return "rotation-group"; }
  Vec base_point() const override;
  double constraint_residual(const Vec& x) const override;
  Vec retract(const Vec& y) const override;
  double tangent_residual(const Vec& x, const Vec& v) const override;
  Vec tangent_part(const Vec& x, const Vec& v) const override;
  double inner(const Vec& x, const Vec& u, const Vec& v) const override;
  Mat tangent_basis(const Vec& x) const override;
  Mat diffusion(const Vec& x) const override;
  Mat diffusion_derivative(const Vec& x, const Vec& v) const override;
  Vec right_inverse(const Vec& x, const Vec& v) const override;
  Mat relevant_projection(const Vec& x) const override;
  Mat relevant_projection_derivative(const Vec& x, const Vec& v) const override;
  Vec drift(const Vec& x) const override;
  Vec nabla_drift(const Vec& x, const Vec& v) const override;
  Vec nabla_diffusion(const Vec& x, const Vec& v, const Vec& e) const override;
  Vec ricci_sharp(const Vec& x, const Vec& v) const override;
  Vec curve(const Vec& x, const Vec& v, double s) const override;
  Field extend(const Vec& x, const Vec& u) const override;
  Vec step(const Vec& x, const Vec& increment, double dt) const override;
  StepJacobians step_jacobians(const Vec& x, const Vec& increment, double dt) const override;
  Mat transport_frame(const Vec& from, const Vec& to, const Mat& frame) const override;
  Mat adjoint_transport_frame(const Vec& from, const Vec& to, const Mat& frame) const override;
  bool adjoint_is_parallel() const noexcept override { return false; }
};

using ModelPtr = std::shared_ptr<const Manifold>;

ModelPtr make_model(ModelKind kind);
ModelKind parse_model(const std::string& name);

// SO(3) helpers.
Mat3 hat(const Vec3& w);
Vec3 vee(const Mat3& s);
Mat3 so3_exp(const Vec3& w);
/// Right Jacobian: exp(w + dw) = exp(w) exp(hat(J_r(w) dw)) + O(dw^2).
Mat3 so3_right_jacobian(const Vec3& w);
Mat3 as_mat3(const Vec& x);
Vec from_mat3(const Mat3& g);

// Checked operations.

inline constexpr double kConstraintTol = 1e-8;
inline constexpr double kTangentTol = 1e-8;
inline constexpr double kDefaultFdStep = 1e-5;

void require_on_manifold(const Manifold& model, const Vec& x);
void require_tangent(const Manifold& model, const Vec& x, const Vec& v);

/// X(x)e; throws on a point off the manifold.
Vec diffusion_map(const Manifold& model, const Vec& x, const Vec& e);
/// Y(x)v; throws when v is not tangent.
Vec right_inverse(const Manifold& model, const Vec& x, const Vec& v);
/// nabla_v U = X(x) d(Y(U(.)))(v) by central differences along model.curve.
Vec lw_covariant_derivative(const Manifold& model, const Vec& x, const Vec& v, const Field& U,
                            double step = kDefaultFdStep);
Vec ricci_sharp(const Manifold& model, const Vec& x, const Vec& v);

// Finite-difference twins of the analytic derivatives.
Mat fd_diffusion_derivative(const Manifold& model, const Vec& x, const Vec& v,
                            double step = kDefaultFdStep);
Mat fd_relevant_projection_derivative(const Manifold& model, const Vec& x, const Vec& v,
                                      double step = kDefaultFdStep);
StepJacobians fd_step_jacobians(const Manifold& model, const Vec& x, const Vec& increment,
                                double dt, double step = kDefaultFdStep);

// Random test points.
Vec random_point(const Manifold& model, std::uint64_t seed, std::uint64_t index);
Vec random_tangent(const Manifold& model, const Vec& x, std::uint64_t seed, std::uint64_t index);
Vec random_noise(const Manifold& model, std::uint64_t seed, std::uint64_t index);

}  // namespace pathspace::geometry
