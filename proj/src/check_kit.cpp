#include "check_kit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pathspace::harness::kit {

std::vector<ModelKind> Ctx::models() const {
  if (cfg.model) return {*cfg.model};
  return {ModelKind::sphere_gradient, ModelKind::rotation_group};
}

void Ctx::bound(const std::string& name, double error, double tol) {
  const double t = tol * scale();
  add({name, 0.0, error, 0.0, 0.0, t, std::isfinite(error) && std::abs(error) <= t});
}

void Ctx::exact(const std::string& name, double estimate, double target) {
  const double t = 1e-12 * std::max(1.0, std::abs(target));
  add({name, target, estimate, 0.0, 0.0, t, std::abs(estimate - target) <= t});
}

void Ctx::statistical(const std::string& name, const stats::EstimateWithCI& e, double z_max) {
  const double t = z_max * scale();
  bool pass;
  if (e.se > 0.0) pass = std::abs(e.z) <= t;
  else pass = std::abs(e.mean - e.target) <= 1e-12 * std::max(1.0, std::abs(e.target));
  add({name, e.target, e.mean, e.se, e.z, t, pass && std::isfinite(e.mean)});
}

void Ctx::biased(const std::string& name, const stats::EstimateWithCI& e, double z_max, double bias) {
  const double t = scale() * (z_max * e.se + bias);
  add({name, e.target, e.mean, e.se, e.z, t, std::isfinite(e.mean) && std::abs(e.mean - e.target) <= t});
}

void Ctx::at_least(const std::string& name, double estimate, double threshold) {
  add({name, threshold, estimate, 0.0, 0.0, threshold, estimate >= threshold});
}

void Ctx::info(const std::string& name, double estimate, double se) {
  add({name, 0.0, estimate, se, 0.0, 0.0, std::isfinite(estimate)});
}

std::string label(const std::string& base, ModelKind kind) { return base + "/" + model_name(kind); }

Vec fixed_vector(int d, int which) {
  Vec v(d);
  for (int j = 0; j < d; ++j) v[j] = std::cos(1.3 * (j + 1) + 2.1 * which) + 0.25;
  return v / v.norm();
}

std::vector<paths::CylindricalFunction> test_functions(const TimeGrid& grid, int d) {
  using paths::CylindricalFunction;
  const Vec a = fixed_vector(d, 0), b = fixed_vector(d, 1), c = fixed_vector(d, 2);
  const double T = grid.horizon;
  std::vector<CylindricalFunction> fs;
  fs.push_back(CylindricalFunction::make(
      grid, {T}, [=](std::span<const Vec> x) { return c.dot(x[0]); },
      [=](std::span<const Vec>) { return std::vector<Vec>{c}; }));
  fs.push_back(CylindricalFunction::make(
      grid, {0.5 * T, T}, [=](std::span<const Vec> x) { return a.dot(x[0]) * b.dot(x[1]); },
      [=](std::span<const Vec> x) { return std::vector<Vec>{a * b.dot(x[1]), b * a.dot(x[0])}; }));
  fs.push_back(CylindricalFunction::make(
      grid, {0.25 * T, 0.75 * T}, [=](std::span<const Vec> x) { return std::sin(a.dot(x[0])) + x[0].dot(x[1]); },
      [=](std::span<const Vec> x) {
        return std::vector<Vec>{std::cos(a.dot(x[0])) * a + x[1], x[0]};
      }));
  return fs;
}

std::vector<CameronMartinVector> test_directions(const TimeGrid& grid, int m) {
  const double T = grid.horizon;
  auto pattern = [m](double p, double q, double r) {
    Vec v(m);
    const double base[3] = {p, q, r};
    for (int i = 0; i < m; ++i) v[i] = base[i % 3];
    return v;
  };
  const Vec c1 = pattern(1.0, 0.5, -0.3), c2 = pattern(0.2, 1.0, 0.4), c3a = pattern(0.0, 0.0, 1.0),
            c3b = pattern(0.7, -0.7, 0.0);
  return {
      CameronMartinVector::from_slope(grid, [=](double) { return c1; }),
      CameronMartinVector::from_slope(grid, [=](double t) { return Vec(std::sin(M_PI * t / T) * c2); }),
      CameronMartinVector::from_slope(grid, [=](double t) { return t < 0.5 * T ? c3a : c3b; }),
  };
}

std::vector<Vec> test_alpha(const sde::SolutionPath& path) {
  const Vec c = fixed_vector(path.model->ambient_dim(), 3);
  std::vector<Vec> alpha(path.steps() + 1);
  for (int k = 0; k <= path.steps(); ++k)
    alpha[k] = path.model->tangent_part(path.points[k], c) * std::cos(path.grid().time(k));
  return alpha;
}

paths::HOneForm test_form(const sde::SolutionPath& path, const paths::TransportFrame& frame) {
  return paths::form_from_density(path, frame, test_alpha(path));
}

double fraction_within(const std::vector<double>& zs, double z_max) {
  if (zs.empty()) return 0.0;
  std::size_t in = 0;
  for (double z : zs) in += std::abs(z) <= z_max ? 1 : 0;
  return static_cast<double>(in) / static_cast<double>(zs.size());
}

sde::SolutionPath sample_path(geometry::ModelPtr model, const TimeGrid& grid, std::uint64_t seed,
                              std::uint64_t index) {
  const Vec x0 = model->base_point();
  const int m = model->noise_dim();
  return sde::integrate(std::move(model), x0, sample_driver(grid, m, seed, index));
}

std::vector<BrownianDriver> coupled_levels(double horizon, int coarse_steps, int levels, int dim,
                                           std::uint64_t seed, std::uint64_t path) {
  std::vector<BrownianDriver> out;
  out.reserve(levels);
  out.push_back(sample_driver(TimeGrid::make(horizon, coarse_steps), dim, seed, path));
  for (int l = 1; l < levels; ++l) out.push_back(refine_driver(out.back()));
  return out;
}

LevelErrors collect(const std::vector<double>& dt, const std::vector<std::vector<double>>& per_path) {
  LevelErrors e;
  e.dt = dt;
  const std::size_t levels = dt.size();
  for (std::size_t l = 0; l < levels; ++l) {
    std::vector<double> xs(per_path.size());
    for (std::size_t i = 0; i < per_path.size(); ++i) xs[i] = per_path[i][l];
    e.error.push_back(stats::mean(xs));
    e.error_se.push_back(xs.size() > 1 ? std::sqrt(stats::variance(xs) / xs.size()) : 0.0);
    e.worst.push_back(xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end()));
    if (l + 1 == levels) e.finest = xs;
  }
  return e;
}

int coarse_steps(int finest, int levels) {
  const int factor = 1 << (levels - 1);
  if (finest < factor || finest % factor != 0)
    fail(ErrorCode::config, "steps (" + std::to_string(finest) + ") must be a multiple of 2^(levels-1) = " +
                                std::to_string(factor));
  return finest / factor;
}

SweepResult summarize(const LevelErrors& e) {
  SweepResult s;
  s.dt = e.dt;
  s.error = e.error;
  s.exact = true;
  for (double w : e.worst) s.exact = s.exact && w <= 1e-10;
  for (std::size_t l = 1; l < e.error.size(); ++l) s.monotone = s.monotone && e.error[l] < e.error[l - 1];
  s.order = (s.monotone && !s.exact) ? stats::log_log_slope(e.dt, e.error) : NAN;
  return s;
}

}  // namespace pathspace::harness::kit
