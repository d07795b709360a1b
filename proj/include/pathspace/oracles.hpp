#pragma once

// Finite-difference evaluators built only from lw_covariant_derivative and
// the model's curve/extend. They never look at the analytic curvature, so
// they serve as independent references for ricci_sharp and friends.

#include "pathspace/geometry.hpp"

namespace pathspace::geometry {

/// Lie bracket [U, V](x) of two local fields, by central differences.
Vec lie_bracket_fd(const Manifold& model, const Vec& x, const Field& U, const Field& V,
                   double step = 1e-4);

/// R(u, v)w = nabla_u nabla_v W - nabla_v nabla_u W - nabla_[U,V] W using the
/// model's canonical extensions of u, v, w.
Vec curvature_fd(const Manifold& model, const Vec& x, const Vec& u, const Vec& v, const Vec& w,
                 double step = 1e-4);

/// sum_i R(v, e_i) e_i over an orthonormal basis of T_xM.
Vec ricci_sharp_fd(const Manifold& model, const Vec& x, const Vec& v, double step = 1e-4);

/// |d<U,V>(v) - <nabla_v U, V> - <U, nabla_v V>| for the canonical
/// extensions of u and w.
double metric_defect_fd(const Manifold& model, const Vec& x, const Vec& v, const Vec& u,
                        const Vec& w, double step = kDefaultFdStep);

}  // namespace pathspace::geometry
