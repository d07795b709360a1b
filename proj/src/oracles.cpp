#include "pathspace/oracles.hpp"

namespace pathspace::geometry {

Vec lie_bracket_fd(const Manifold& model, const Vec& x, const Field& U, const Field& V,
                   double step) {
  const Vec u = U(x), v = V(x);
  const Vec dv_u = (V(model.curve(x, u, step)) - V(model.curve(x, u, -step))) / (2.0 * step);
  const Vec du_v = (U(model.curve(x, v, step)) - U(model.curve(x, v, -step))) / (2.0 * step);
  return model.tangent_part(x, dv_u - du_v);
}

Vec curvature_fd(const Manifold& model, const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                 double step) {
  const Field U = model.extend(x, u);
  const Field V = model.extend(x, v);
  const Field W = model.extend(x, w);
  const Field nabla_V_W = [&](const Vec& y) { return lw_covariant_derivative(model, y, V(y), W, step); };
  const Field nabla_U_W = [&](const Vec& y) { return lw_covariant_derivative(model, y, U(y), W, step); };
  const Vec uv = lw_covariant_derivative(model, x, u, nabla_V_W, step);
  const Vec vu = lw_covariant_derivative(model, x, v, nabla_U_W, step);
  const Vec bracket = lie_bracket_fd(model, x, U, V, step);
  return uv - vu - lw_covariant_derivative(model, x, bracket, W, step);
}

Vec ricci_sharp_fd(const Manifold& model, const Vec& x, const Vec& v, double step) {
  const Mat basis = model.tangent_basis(x);
  Vec out = Vec::Zero(model.ambient_dim());
  for (int i = 0; i < basis.cols(); ++i)
    out += curvature_fd(model, x, v, basis.col(i), basis.col(i), step);
  return out;
}

double metric_defect_fd(const Manifold& model, const Vec& x, const Vec& v, const Vec& u,
                        const Vec& w, double step) {
  const Field U = model.extend(x, u);
  const Field W = model.extend(x, w);
  const Vec fwd = model.curve(x, v, step), bwd = model.curve(x, v, -step);
  const double d_inner =
      (model.inner(fwd, U(fwd), W(fwd)) - model.inner(bwd, U(bwd), W(bwd))) / (2.0 * step);
  const double rhs = model.inner(x, lw_covariant_derivative(model, x, v, U, step), w) +
                     model.inner(x, u, lw_covariant_derivative(model, x, v, W, step));
  return std::abs(d_inner - rhs);
}

}  // namespace pathspace::geometry
