// Flat Wiener-space checks: the chaos remainder identity, moments of
// iterated integrals and exponential martingales, and conditioning of the
// exponential martingale on the solution path.

#include "check_kit.hpp"

#include "pathspace/wiener.hpp"

#include <array>
#include <cmath>

namespace pathspace::harness::kit {

void chaos_identity(Ctx& ctx) {
  ctx.report.model = "none";
  const double T = ctx.cfg.horizon;
  const int paths = ctx.paths(100000);
  const std::uint64_t seed = ctx.seed();

  const auto sq = wiener::chaos_remainder_identity_check(2, 1, T, paths, seed);
  const double sq_closed = 4.0 * T * T;
  ctx.exact("B_T^2/k=1/lhs-closed-form", sq.lhs, sq_closed);
  ctx.exact("B_T^2/k=1/rhs-quadrature", sq.rhs, sq_closed);
  ctx.statistical("B_T^2/k=1/monte-carlo-lhs", sq.lhs_mc, sq.lhs_mc.z_max);

  const auto cube = wiener::chaos_remainder_identity_check(3, 1, T, paths, seed + 1);
  ctx.exact("B_T^3/k=1/lhs-closed-form", cube.lhs, 18.0 * T * T * T);
  ctx.exact("B_T^3/k=1/rhs-quadrature", cube.rhs, 18.0 * T * T * T);
  ctx.statistical("B_T^3/k=1/monte-carlo-lhs", cube.lhs_mc, cube.lhs_mc.z_max);

  const auto none = wiener::chaos_remainder_identity_check(2, 2, T, 2, seed);
  ctx.exact("B_T^2/k=2/remainder-vanishes", none.lhs + none.rhs, 0.0);

  const auto deep = wiener::chaos_remainder_identity_check(5, 2, T, 2, seed);
  ctx.bound("B_T^5/k=2/relative-residual", deep.residual / deep.lhs, 1e-12);
}

void chaos_moment(Ctx& ctx) {
  ctx.report.model = "none";
  const TimeGrid grid = ctx.grid(500);
  const int paths = ctx.paths(100000);
  const auto a1 = wiener::ChaosCoefficient::constant_first_component(grid, 1, 1);
  const auto a2 = wiener::ChaosCoefficient::constant_first_component(grid, 1, 2);
  const auto rows = parallel::map_indices<std::array<double, 2>>(paths, ctx.workers(), [&](long i) {
    const BrownianDriver d = sample_driver(grid, 1, ctx.seed(), i);
    const double i1 = wiener::iterated_integral(d, a1), i2 = wiener::iterated_integral(d, a2);
    return std::array<double, 2>{i2 * i2, i1 * i2};
  });
  std::vector<double> sq(paths), cross(paths);
  for (int i = 0; i < paths; ++i) {
    sq[i] = rows[i][0];
    cross[i] = rows[i][1];
  }
  const double T = grid.horizon;
  ctx.statistical("E[I_2(1)^2]", stats::estimate(sq, 2.0 * T * T), 3.0);
  ctx.statistical("E[I_1(1) I_2(1)]", stats::estimate(cross, 0.0), 4.0);
  ctx.note("grid-exact second moment is 2 T^2 (1 - 1/N) = " +
           format_number(4.0 * wiener::simplex_norm_squared(a2, grid.dt())));
}

void cond_exp_martingale(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(500);
  const int bases = ctx.paths(32), resamples = ctx.resamples(1024);
  const int m = model->noise_dim();
  // |a|_H = 1.
  const Vec slope = fixed_vector(m, 4) / std::sqrt(grid.horizon);
  const auto a = CameronMartinVector::from_slope(grid, [&](double) { return slope; });
  const auto zero = CameronMartinVector::zero(grid, m);
  const double z_max = stats::kDefaultZMax * ctx.scale();
  // [z, pathwise |eps - eps_tilde|, |eps_tilde(0) - 1|, |mean eps(0) over resamples - 1|]
  const auto rows = parallel::map_indices<std::array<double, 4>>(bases, ctx.workers(), [&](long b) {
    const sde::SolutionPath base = sample_path(model, grid, ctx.seed(), b);
    const auto rep = wiener::conditional_exp_martingale_check(base, a, resamples, stats::kDefaultZMax);
    const double analytic = wiener::conditional_exp_martingale(base, a);
    const auto zero_rep = wiener::conditional_exp_martingale_check(base, zero, 2);
    return std::array<double, 4>{rep.resampled.z, std::abs(wiener::exp_martingale(base.driver, a) - analytic),
                                 std::abs(zero_rep.analytic - 1.0), std::abs(zero_rep.resampled.mean - 1.0)};
  });
  std::vector<double> zs;
  double pathwise = 0.0, zero_analytic = 0.0, zero_resampled = 0.0;
  for (const auto& r : rows) {
    zs.push_back(r[0]);
    pathwise = std::max(pathwise, r[1]);
    zero_analytic = std::max(zero_analytic, r[2]);
    zero_resampled = std::max(zero_resampled, r[3]);
  }
  ctx.exact("a=0/eps-tilde-is-one", zero_analytic, 0.0);
  ctx.exact("a=0/resampled-mean-is-one", zero_resampled, 0.0);
  const bool trivial = sde::decompose_noise(sample_path(model, TimeGrid::make(grid.horizon, 4), ctx.seed(), 0))
                           .redundant_dim == 0;
  if (trivial) {
    ctx.report.trivial = true;
    ctx.note("ker X is trivial on this model: eps_tilde(a) = eps(a) pathwise");
    ctx.bound("pathwise-eps-equals-eps-tilde", pathwise, 1e-12);
  }
  ctx.at_least("fraction|z|<=4", fraction_within(zs, z_max), 0.95);
}

void wiener_moments(Ctx& ctx) {
  ctx.report.model = "none";
  const TimeGrid grid = ctx.grid(100);
  const int paths = ctx.paths(100000);
  const int m = 3;
  const double T = grid.horizon;
  const Vec slope = fixed_vector(m, 5) / std::sqrt(T);
  const auto a = CameronMartinVector::from_slope(grid, [&](double) { return slope; });
  const auto h = test_directions(grid, m)[1];
  const Vec p = fixed_vector(m, 6), q = fixed_vector(m, 7), r = fixed_vector(m, 8);
  const int mid = grid.snap(0.5 * T);
  const wiener::WienerFunctional F = [&](const BrownianDriver& d) {
    Vec b = Vec::Zero(m), half = Vec::Zero(m);
    for (int k = 0; k < d.grid.steps; ++k) {
      if (k == mid) half = b;
      b += d.increments[k];
    }
    return std::sin(p.dot(b)) + q.dot(half) * r.dot(b);
  };
  double ah = 0.0;
  for (int k = 0; k < grid.steps; ++k) ah += a.slopes[k].dot(h.slopes[k]) * grid.dt();
  // [ito^2, eps, eps^2, paired IBP difference, relative FD error of d eps(h)]
  const auto rows = parallel::map_indices<std::array<double, 5>>(paths, ctx.workers(), [&](long i) {
    const BrownianDriver d = sample_driver(grid, m, ctx.seed(), i);
    const double ito = wiener::ito_integral(d, [](int, std::span<const Vec> past) {
      Vec b = Vec::Zero(3);
      for (const Vec& inc : past) b += inc;
      return b;
    });
    const double eps = wiener::exp_martingale(d, a);
    const double dF = wiener::malliavin_derivative_fd(F, d, h).richardson;
    std::array<double, 5> out{ito * ito, eps, eps * eps, dF + F(d) * wiener::divergence(d, h), 0.0};
    if (i < 100) {
      const wiener::WienerFunctional E = [&](const BrownianDriver& x) { return wiener::exp_martingale(x, a); };
      const double fd = wiener::malliavin_derivative_fd(E, d, h).richardson;
      out[4] = std::abs(fd - eps * ah) / std::max(1e-300, std::abs(eps * ah));
    }
    return out;
  });
  std::array<std::vector<double>, 4> cols;
  double fd_err = 0.0;
  for (const auto& row : rows) {
    for (int j = 0; j < 4; ++j) cols[j].push_back(row[j]);
    fd_err = std::max(fd_err, row[4]);
  }
  // E (sum <B_k, dB_k>)^2 = m dt^2 sum_k k = m T^2 (1 - 1/N) / 2 exactly.
  const double ito_target = m * T * T * (1.0 - 1.0 / grid.steps) / 2.0;
  ctx.statistical("ito-isometry/int<B,dB>", stats::estimate(cols[0], ito_target), 4.0);
  ctx.statistical("exp-martingale/mean", stats::estimate(cols[1], 1.0), 4.0);
  ctx.statistical("exp-martingale/second-moment", stats::estimate(cols[2], std::exp(a.norm_squared())), 4.0);
  ctx.statistical("flat-ibp/paired-difference", stats::estimate(cols[3], 0.0), 4.0);
  ctx.bound("malliavin-fd-vs-closed-form/relative", fd_err, 1e-6);
}

}  // namespace pathspace::harness::kit
