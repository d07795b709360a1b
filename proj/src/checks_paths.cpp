// Checks on path space: the derivative of the Ito map against the covariant
// route and finite differences, filtering onto the solution path,
// integration by parts, pull-back of one-forms, and the noise split.

#include "check_kit.hpp"
#include "result_cache.hpp"

#include "pathspace/wiener.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace pathspace::harness::kit {

namespace {

double sup_metric_distance(const sde::SolutionPath& p, const PathVectorField& a, const PathVectorField& b) {
  double m = 0.0;
  for (int k = 0; k <= p.steps(); ++k) {
    const Vec d = a.values[k] - b.values[k];
    m = std::max(m, std::sqrt(p.model->inner(p.points[k], d, d)));
  }
  return m;
}

std::string key_of(const Ctx& ctx, const std::string& what, ModelKind kind, int steps, int paths, int extra) {
  std::ostringstream o;
  o << what << '|' << model_name(kind) << '|' << format_number(ctx.cfg.horizon) << '|' << steps << '|' << paths
    << '|' << extra << '|' << ctx.seed();
  return o.str();
}

std::vector<double> level_dts(double horizon, int coarse, int levels) {
  std::vector<double> dt;
  for (int l = 0; l < levels; ++l) dt.push_back(horizon / (coarse << l));
  return dt;
}

void order_row(Ctx& ctx, const LevelErrors& e, double threshold) {
  const SweepResult s = summarize(e);
  for (std::size_t l = 0; l < e.dt.size(); ++l)
    ctx.info("mean-error/dt=" + format_number(e.dt[l]), e.error[l], e.error_se[l]);
  ctx.at_least("observed-order", s.order, threshold);
  if (!s.monotone)
    ctx.note("errors not monotone in dt (order undefined); least-squares slope would be " +
             format_number(stats::log_log_slope(e.dt, e.error)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Bismut derivative vs the covariant equation.

LevelErrors sweep_bismut_covariant(const Ctx& ctx, int levels) {
  const geometry::ModelPtr model = geometry::make_model(ctx.model(ModelKind::sphere_gradient));
  const int finest = ctx.steps(10000);
  const int coarse = coarse_steps(finest, levels);
  const int paths = ctx.paths(8);
  const auto per_path = parallel::map_indices<std::vector<double>>(paths, ctx.workers(), [&](long i) {
    std::vector<double> errs;
    for (const BrownianDriver& d : coupled_levels(ctx.cfg.horizon, coarse, levels, model->noise_dim(), ctx.seed(), i)) {
      const sde::SolutionPath p = sde::integrate(model, model->base_point(), d);
      const CameronMartinVector h = test_directions(p.grid(), model->noise_dim())[0];
      const sde::NoiseSplit split = sde::decompose_noise(p);
      const transport::TransportFrame frame = transport::transport_frames(p);
      errs.push_back(sup_metric_distance(p, sde::covariant_derivative_path(p, split, frame, h),
                                         sde::bismut_derivative(p, h)));
    }
    return errs;
  });
  return collect(level_dts(ctx.cfg.horizon, coarse, levels), per_path);
}

void bismut_covariant(Ctx& ctx) {
  ctx.report.model = model_name(ctx.model(ModelKind::sphere_gradient));
  const LevelErrors e = sweep_bismut_covariant(ctx, ctx.cfg.levels);
  for (std::size_t i = 0; i < e.finest.size(); ++i)
    ctx.bound("sup-error/dt=" + format_number(e.dt.back()) + "/seed=" + std::to_string(i), e.finest[i], 1e-2);
  order_row(ctx, e, 0.8);
}

// ---------------------------------------------------------------------------
// d_H f (T I h) against finite differences of f o I.

void intertwine_fd(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(10000);
  const int seeds = ctx.paths(8);
  const double eps = 1e-4;
  const auto fs = test_functions(grid, model->ambient_dim());
  const auto hs = test_directions(grid, model->noise_dim());
  const auto per_seed = parallel::map_indices<std::vector<double>>(seeds, ctx.workers(), [&](long i) {
    const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
    std::vector<double> errs;
    for (const auto& h : hs) {
      const PathVectorField v = sde::bismut_derivative(p, h);
      const sde::SolutionPath up = sde::integrate(model, p.points[0], shifted(p.driver, h, eps));
      const sde::SolutionPath down = sde::integrate(model, p.points[0], shifted(p.driver, h, -eps));
      for (const auto& f : fs)
        errs.push_back(std::abs(paths::cylindrical_dH(f, p, v) - (f(up) - f(down)) / (2.0 * eps)));
    }
    return errs;
  });
  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      double worst = 0.0;
      for (const auto& errs : per_seed) worst = std::max(worst, errs[hi * fs.size() + fi]);
      ctx.bound("f" + std::to_string(fi + 1) + "-h" + std::to_string(hi + 1) + "/max-over-seeds", worst, 1e-3);
    }
  }
}

// ---------------------------------------------------------------------------
// On the group nothing is filtered away: T I h = xbar h up to the scheme.

LevelErrors sweep_intertwine_group(const Ctx& ctx, int levels) {
  const geometry::ModelPtr model = geometry::make_model(ModelKind::rotation_group);
  const int finest = ctx.steps(1000);
  const int coarse = coarse_steps(finest, levels);
  const int paths = ctx.paths(8);
  const auto per_path = parallel::map_indices<std::vector<double>>(paths, ctx.workers(), [&](long i) {
    std::vector<double> errs;
    for (const BrownianDriver& d : coupled_levels(ctx.cfg.horizon, coarse, levels, 3, ctx.seed(), i)) {
      const sde::SolutionPath p = sde::integrate(model, model->base_point(), d);
      const CameronMartinVector h = test_directions(p.grid(), 3)[1];
      const transport::TransportFrame frame = transport::transport_frames(p);
      errs.push_back(sup_metric_distance(p, sde::bismut_derivative(p, h), paths::xbar(p, frame, h).field));
    }
    return errs;
  });
  return collect(level_dts(ctx.cfg.horizon, coarse, levels), per_path);
}

void intertwine_group(Ctx& ctx) {
  ctx.report.model = "group";
  if (ctx.cfg.model == ModelKind::sphere_gradient) ctx.note("runs on the rotation group regardless of --model");
  const LevelErrors e = sweep_intertwine_group(ctx, ctx.cfg.levels);
  for (std::size_t l = 0; l < e.dt.size(); ++l)
    ctx.bound("max-sup-error/dt=" + format_number(e.dt[l]), e.worst[l], 10.0 * e.dt[l]);
  order_row(ctx, e, 0.8);
}

// ---------------------------------------------------------------------------
// Conditional ensembles: resample the redundant noise on fixed base paths.

namespace {

constexpr double kFilterTimes[3] = {0.25, 0.5, 1.0};

struct ConditionalEnsemble {
  std::vector<std::vector<double>> filter_z;  // [time][base * n + component]
  std::vector<double> pullback_z;             // per base
  double max_deviation = 0.0;
  bool trivial = false;
};

ConditionalEnsemble conditional_ensemble(const Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  const TimeGrid grid = ctx.grid(500);
  const int bases = ctx.paths(64), resamples = ctx.resamples(512);
  const std::string key = key_of(ctx, "conditional", kind, grid.steps, bases, resamples);
  return *cache::get_or_compute<ConditionalEnsemble>(key, [&] {
    const geometry::ModelPtr model = geometry::make_model(kind);
    const int n = model->intrinsic_dim();
    const double z_max = stats::kDefaultZMax;
    struct PerBase {
      std::vector<std::vector<double>> z;  // [time][component]
      double pull_z = 0.0;
      double deviation = 0.0;
    };
    const auto per_base = parallel::map_indices<PerBase>(bases, ctx.workers(), [&](long b) {
      const sde::SolutionPath base = sample_path(model, grid, ctx.seed(), b);
      const sde::NoiseSplit split = sde::decompose_noise(base);
      const transport::TransportFrame frame = transport::transport_frames(base);
      const CameronMartinVector h = test_directions(grid, model->noise_dim())[0];
      const paths::BismutTangent target = paths::xbar(base, frame, h);
      std::vector<int> nodes;
      std::vector<Mat> basis;
      for (double t : kFilterTimes) {
        nodes.push_back(grid.snap(t * grid.horizon));
        basis.push_back(model->tangent_basis(base.points[nodes.back()]));
      }
      // samples[time][component][resample]
      std::vector<std::vector<std::vector<double>>> samples(3, std::vector<std::vector<double>>(n, std::vector<double>(resamples)));
      std::vector<double> pulled(resamples);
      PerBase out;
      for (int r = 0; r < resamples; ++r) {
        const sde::Resampled res = sde::reconstruct_driver(base, split, sde::fresh_redundant(base, r));
        out.deviation = std::max(out.deviation, res.max_deviation);
        const PathVectorField v = sde::bismut_derivative(res.path, h);
        for (int t = 0; t < 3; ++t) {
          const Vec c = model->frame_coords(base.points[nodes[t]], basis[t], v.values[nodes[t]]);
          for (int j = 0; j < n; ++j) samples[t][j][r] = c[j];
        }
        const transport::TransportFrame f = transport::transport_frames(res.path);
        pulled[r] = paths::pullback_one_form(res.path, res.split, test_form(res.path, f), h, v);
      }
      out.z.assign(3, std::vector<double>(n));
      for (int t = 0; t < 3; ++t) {
        const Vec c = model->frame_coords(base.points[nodes[t]], basis[t], target.field.values[nodes[t]]);
        for (int j = 0; j < n; ++j) out.z[t][j] = stats::estimate(samples[t][j], c[j], z_max).z;
      }
      out.pull_z = stats::estimate(pulled, test_form(base, frame)(base, target), z_max).z;
      return out;
    });
    ConditionalEnsemble e;
    e.trivial = sde::decompose_noise(sample_path(model, TimeGrid::make(grid.horizon, 4), ctx.seed(), 0)).redundant_dim == 0;
    e.filter_z.assign(3, {});
    for (const PerBase& pb : per_base) {
      for (int t = 0; t < 3; ++t) e.filter_z[t].insert(e.filter_z[t].end(), pb.z[t].begin(), pb.z[t].end());
      e.pullback_z.push_back(pb.pull_z);
      e.max_deviation = std::max(e.max_deviation, pb.deviation);
    }
    return e;
  });
}

void describe_conditional(Ctx& ctx, const ConditionalEnsemble& e) {
  ctx.report.trivial = e.trivial;
  if (e.trivial) ctx.note("no redundant noise on this model: resamples coincide and the check is exact");
  ctx.note("max resampled-path deviation " + format_number(e.max_deviation));
}

}  // namespace

void filtering(Ctx& ctx) {
  ctx.report.model = model_name(ctx.model(ModelKind::sphere_gradient));
  const ConditionalEnsemble e = conditional_ensemble(ctx);
  describe_conditional(ctx, e);
  const double z_max = stats::kDefaultZMax * ctx.scale();
  std::vector<double> all;
  for (int t = 0; t < 3; ++t) {
    ctx.info("fraction|z|<=4/t=" + format_number(kFilterTimes[t] * ctx.cfg.horizon),
             fraction_within(e.filter_z[t], z_max));
    all.insert(all.end(), e.filter_z[t].begin(), e.filter_z[t].end());
  }
  ctx.at_least("fraction|z|<=4/all", fraction_within(all, z_max), 0.95);
}

void pullback_conditional(Ctx& ctx) {
  ctx.report.model = model_name(ctx.model(ModelKind::sphere_gradient));
  const ConditionalEnsemble e = conditional_ensemble(ctx);
  describe_conditional(ctx, e);
  ctx.at_least("fraction|z|<=4", fraction_within(e.pullback_z, stats::kDefaultZMax * ctx.scale()), 0.95);
}

// ---------------------------------------------------------------------------
// E[d_H f(xbar h)] = E[f(x) int <hdot, dB>].

void ibp(Ctx& ctx) {
  const auto kinds = ctx.models();
  ctx.report.model = kinds.size() == 1 ? model_name(kinds[0]) : "both";
  const TimeGrid grid = ctx.grid(250);
  const int paths = ctx.paths(100000);
  for (ModelKind kind : kinds) {
    const geometry::ModelPtr model = geometry::make_model(kind);
    const auto fs = test_functions(grid, model->ambient_dim());
    const auto hs = test_directions(grid, model->noise_dim());
    // [lhs_1, rhs_1, lhs_2, rhs_2, lhs_3, rhs_3] per path; pair j uses (f_j, h_j).
    const auto rows = parallel::map_indices<std::array<double, 6>>(paths, ctx.workers(), [&](long i) {
      const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
      const transport::TransportFrame frame = transport::transport_frames(p);
      std::array<double, 6> out{};
      for (int j = 0; j < 3; ++j) {
        out[2 * j] = paths::cylindrical_dH(fs[j], p, paths::xbar(p, frame, hs[j]).field);
        out[2 * j + 1] = -fs[j](p) * wiener::divergence(p.driver, hs[j]);
      }
      return out;
    });
    for (int j = 0; j < 3; ++j) {
      std::vector<double> diff(paths), lhs(paths), rhs(paths);
      for (int i = 0; i < paths; ++i) {
        lhs[i] = rows[i][2 * j];
        rhs[i] = rows[i][2 * j + 1];
        diff[i] = lhs[i] - rhs[i];
      }
      ctx.statistical(label("f" + std::to_string(j + 1) + "-h" + std::to_string(j + 1) + "/paired-difference", kind),
                      stats::estimate(diff, 0.0, 3.0), 3.0);
      ctx.note(label("pair " + std::to_string(j + 1), kind) + ": E[df(xbar h)] = " + format_number(stats::mean(lhs)) +
               ", E[f int<hdot,dB>] = " + format_number(stats::mean(rhs)));
    }
  }
}

// ---------------------------------------------------------------------------
// Pull-back of a one-form vs the form applied to T I h.

namespace {

struct PullbackEnsemble {
  LevelErrors levels;
  std::vector<double> filtered;  // phi(xbar h), finest level
  std::vector<double> pulled;    // I^* phi (h), finest level
  double h_norm = 0.0;
};

PullbackEnsemble pullback_ensemble(const Ctx& ctx, int levels) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  const int finest = ctx.steps(1000);
  const int coarse = coarse_steps(finest, levels);
  const int paths = ctx.paths(10000);
  const std::string key = key_of(ctx, "pullback", kind, finest, paths, levels);
  return *cache::get_or_compute<PullbackEnsemble>(key, [&] {
    const geometry::ModelPtr model = geometry::make_model(kind);
    struct PerPath {
      std::vector<double> errors;
      double filtered = 0.0, pulled = 0.0;
    };
    const auto per_path = parallel::map_indices<PerPath>(paths, ctx.workers(), [&](long i) {
      PerPath out;
      for (const BrownianDriver& d : coupled_levels(ctx.cfg.horizon, coarse, levels, model->noise_dim(), ctx.seed(), i)) {
        const sde::SolutionPath p = sde::integrate(model, model->base_point(), d);
        const CameronMartinVector h = test_directions(p.grid(), model->noise_dim())[0];
        const sde::NoiseSplit split = sde::decompose_noise(p);
        const transport::TransportFrame frame = transport::transport_frames(p);
        const std::vector<Vec> alpha = test_alpha(p);
        const paths::HOneForm phi = paths::form_from_density(p, frame, alpha);
        const PathVectorField v = sde::bismut_derivative(p, h);
        out.pulled = paths::pullback_one_form(p, split, phi, h, v);
        out.errors.push_back(std::abs(out.pulled - paths::direct_pairing(p, alpha, v)));
        out.filtered = phi(p, paths::xbar(p, frame, h));
      }
      return out;
    });
    PullbackEnsemble e;
    std::vector<std::vector<double>> errs;
    for (const PerPath& pp : per_path) {
      errs.push_back(pp.errors);
      e.filtered.push_back(pp.filtered);
      e.pulled.push_back(pp.pulled);
    }
    e.levels = collect(level_dts(ctx.cfg.horizon, coarse, levels), errs);
    e.h_norm = std::sqrt(test_directions(TimeGrid::make(ctx.cfg.horizon, finest), model->noise_dim())[0].norm_squared());
    return e;
  });
}

}  // namespace

LevelErrors sweep_pullback(const Ctx& ctx, int levels) { return pullback_ensemble(ctx, levels).levels; }

void pullback(Ctx& ctx) {
  ctx.report.model = model_name(ctx.model(ModelKind::sphere_gradient));
  order_row(ctx, pullback_ensemble(ctx, ctx.cfg.levels).levels, 0.4);
}

void domination(Ctx& ctx) {
  ctx.report.model = model_name(ctx.model(ModelKind::sphere_gradient));
  const PullbackEnsemble e = pullback_ensemble(ctx, ctx.cfg.levels);
  const std::size_t n = e.pulled.size();
  std::vector<double> a2(n), b2(n), gap(n);
  for (std::size_t i = 0; i < n; ++i) {
    a2[i] = e.filtered[i] * e.filtered[i];
    b2[i] = e.pulled[i] * e.pulled[i];
    gap[i] = b2[i] - a2[i];
  }
  // L2 norms over paths, per unit |h|; the gap's standard error by the delta method.
  const double na = std::sqrt(stats::mean(a2)), nb = std::sqrt(stats::mean(b2));
  const auto g = stats::estimate(gap, 0.0);
  const double se = g.se / (na + nb) / e.h_norm;
  const double diff = (nb - na) / e.h_norm;
  ctx.info("|phi(xbar h)|_L2/|h|", na / e.h_norm);
  ctx.info("|I*phi(h)|_L2/|h|", nb / e.h_norm);
  const double tol = 3.0 * ctx.scale();
  const double z = se > 0.0 ? diff / se : (diff >= 0.0 ? 0.0 : -INFINITY);
  ctx.add({"norm-gap(pullback-minus-filtered)", 0.0, diff, se, z, tol, z >= -tol});
}

// ---------------------------------------------------------------------------
// Noise split: recombination, law of beta and its independence from x.

void noise_split(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(100);
  const int paths = ctx.paths(100000);
  const Vec x0 = model->base_point();
  const Mat k0 = model->redundant_projection(x0);
  // Unit vector spanning ker X(x_0) when it is one-dimensional (the sphere).
  Vec kernel_dir = Vec::Zero(model->noise_dim());
  for (int j = 0; j < k0.cols() && kernel_dir.norm() == 0.0; ++j)
    if (k0.col(j).norm() > 1e-8) kernel_dir = k0.col(j) / k0.col(j).norm();
  const Vec a = fixed_vector(model->ambient_dim(), 0), c = fixed_vector(model->ambient_dim(), 2);
  const int mid = grid.snap(0.5 * grid.horizon);
  // [recombination, orthogonality, beta_T, sum dbeta^2 / T, phi_1(x), phi_2(x), redundant_dim]
  const auto rows = parallel::map_indices<std::array<double, 7>>(paths, ctx.workers(), [&](long i) {
    const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
    const sde::NoiseSplit s = sde::decompose_noise(p);
    std::array<double, 7> out{};
    double beta = 0.0, qv = 0.0;
    for (int k = 0; k < p.steps(); ++k) {
      out[0] = std::max(out[0], (s.frames[k] * (s.relevant[k] + s.redundant[k]) - p.driver.increments[k]).norm());
      const int m = model->noise_dim();
      out[1] = std::max(out[1], (s.frames[k].transpose() * s.frames[k] - Mat::Identity(m, m)).cwiseAbs().maxCoeff());
      const double db = kernel_dir.dot(s.redundant[k]);
      beta += db;
      qv += db * db;
    }
    out[2] = beta;
    out[3] = qv / grid.horizon;
    out[4] = c.dot(p.points.back());
    out[5] = std::sin(3.0 * a.dot(p.points[mid]));
    out[6] = s.redundant_dim;
    return out;
  });
  double recombination = 0.0, orth = 0.0;
  for (const auto& r : rows) {
    recombination = std::max(recombination, r[0]);
    orth = std::max(orth, r[1]);
  }
  ctx.bound("recombination", recombination, 1e-10);
  ctx.bound("frame-orthogonality", orth, 1e-10);
  if (rows.empty() || rows[0][6] == 0) {
    ctx.report.trivial = true;
    ctx.note("ker X is trivial on this model: beta vanishes identically");
    ctx.exact("redundant-dimension", rows.empty() ? 0.0 : rows[0][6], 0.0);
    return;
  }
  std::vector<double> beta(paths), beta2(paths), qv(paths), cross1(paths), cross2(paths);
  for (int i = 0; i < paths; ++i) {
    beta[i] = rows[i][2];
    beta2[i] = beta[i] * beta[i];
    qv[i] = rows[i][3];
    cross1[i] = beta[i] * rows[i][4];
    cross2[i] = beta[i] * rows[i][5];
  }
  ctx.statistical("beta_T-mean", stats::estimate(beta, 0.0), 4.0);
  ctx.statistical("beta_T-variance", stats::estimate(beta2, grid.horizon), 4.0);
  ctx.statistical("increment-variance/dt", stats::estimate(qv, 1.0), 4.0);
  ctx.statistical("independence/beta_T*<c,x_T>", stats::estimate(cross1, 0.0), 4.0);
  ctx.statistical("independence/beta_T*sin(3<a,x_T/2>)", stats::estimate(cross2, 0.0), 4.0);
}

// ---------------------------------------------------------------------------
// Reconstruction from (Btilde, beta').

LevelErrors sweep_reconstruct(const Ctx& ctx, int levels) {
  const geometry::ModelPtr model = geometry::make_model(ctx.model(ModelKind::sphere_gradient));
  const int finest = ctx.steps(1000);
  const int coarse = coarse_steps(finest, levels);
  const int paths = ctx.paths(16);
  const auto per_path = parallel::map_indices<std::vector<double>>(paths, ctx.workers(), [&](long i) {
    std::vector<double> dev;
    for (const BrownianDriver& d : coupled_levels(ctx.cfg.horizon, coarse, levels, model->noise_dim(), ctx.seed(), i)) {
      const sde::SolutionPath p = sde::integrate(model, model->base_point(), d);
      const sde::NoiseSplit s = sde::decompose_noise(p);
      dev.push_back(sde::reconstruct_driver(p, s, sde::fresh_redundant(p, 0)).max_deviation);
    }
    return dev;
  });
  return collect(level_dts(ctx.cfg.horizon, coarse, levels), per_path);
}

void reconstruct(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(1000);
  const int paths = ctx.paths(16);
  const int resamples = ctx.resamples(4);
  // [identity deviation, driver change, fresh deviation, relevant-noise change]
  const auto rows = parallel::map_indices<std::array<double, 4>>(paths, ctx.workers(), [&](long i) {
    const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
    const sde::NoiseSplit s = sde::decompose_noise(p);
    std::array<double, 4> out{};
    const sde::Resampled same = sde::reconstruct_driver(p, s, s.redundant);
    out[0] = same.max_deviation;
    for (int k = 0; k < p.steps(); ++k)
      out[1] = std::max(out[1], (same.path.driver.increments[k] - p.driver.increments[k]).norm());
    for (int r = 0; r < resamples; ++r) {
      const sde::Resampled fresh = sde::reconstruct_driver(p, s, sde::fresh_redundant(p, r));
      out[2] = std::max(out[2], fresh.max_deviation);
      for (int k = 0; k < p.steps(); ++k) {
        const Mat kp = model->relevant_projection(p.points[k]);
        out[3] = std::max(out[3], (kp * (fresh.path.driver.increments[k] - p.driver.increments[k])).norm());
      }
    }
    return out;
  });
  std::array<double, 4> worst{};
  for (const auto& r : rows)
    for (int j = 0; j < 4; ++j) worst[j] = std::max(worst[j], r[j]);
  ctx.bound("own-beta/path-deviation", worst[0], 1e-10);
  ctx.bound("own-beta/driver-deviation", worst[1], 1e-10);
  ctx.bound("fresh-beta/path-deviation<=10dt", worst[2], 10.0 * grid.dt());
  ctx.bound("fresh-beta/path-deviation-rounding", worst[2], 1e-9);
  ctx.bound("fresh-beta/relevant-noise-unchanged", worst[3], 1e-9);
}

// ---------------------------------------------------------------------------
// xbar / ybar identities and the one-form representation.

void projection(Ctx& ctx) {
  const auto kinds = ctx.models();
  ctx.report.model = kinds.size() == 1 ? model_name(kinds[0]) : "both";
  const TimeGrid grid = ctx.grid(500);
  const int paths = ctx.paths(16);
  for (ModelKind kind : kinds) {
    const geometry::ModelPtr model = geometry::make_model(kind);
    const auto hs = test_directions(grid, model->noise_dim());
    // [isometry, xbar o ybar, ybar o xbar - K^perp, contraction excess, form vs direct]
    const auto rows = parallel::map_indices<std::array<double, 5>>(paths, ctx.workers(), [&](long i) {
      const sde::SolutionPath p = sample_path(model, grid, ctx.seed(), i);
      const transport::TransportFrame frame = transport::transport_frames(p);
      const std::vector<Vec> alpha = test_alpha(p);
      const paths::HOneForm phi = paths::form_from_density(p, frame, alpha);
      std::array<double, 5> out{};
      for (const auto& h : hs) {
        const paths::BismutTangent v = paths::xbar(p, frame, h);
        const CameronMartinVector back = paths::ybar(p, v), rel = paths::relevant_part(p, h);
        const double vn = paths::h_norm_squared(p, v);
        out[0] = std::max(out[0], std::abs(back.norm_squared() - vn));
        const paths::BismutTangent again = paths::xbar(p, frame, back);
        for (int k = 0; k <= p.steps(); ++k)
          out[1] = std::max(out[1], (again.field.values[k] - v.field.values[k]).norm());
        for (int k = 0; k < p.steps(); ++k) out[2] = std::max(out[2], (back.slopes[k] - rel.slopes[k]).norm());
        out[3] = std::max(out[3], vn - h.norm_squared());
        const double direct = paths::direct_pairing(p, alpha, v.field);
        out[4] = std::max(out[4], std::abs(phi(p, v) - direct) / std::max(1.0, std::abs(direct)));
      }
      return out;
    });
    std::array<double, 5> worst{};
    for (const auto& r : rows)
      for (int j = 0; j < 5; ++j) worst[j] = std::max(worst[j], r[j]);
    ctx.bound(label("ybar-isometry", kind), worst[0], 1e-10);
    ctx.bound(label("xbar-ybar-identity", kind), worst[1], 1e-12);
    ctx.bound(label("ybar-xbar-equals-Kperp", kind), worst[2], 1e-12);
    ctx.bound(label("xbar-contraction-excess", kind), std::max(0.0, worst[3]), 1e-12);
    ctx.bound(label("trapezoid-form-vs-direct", kind), worst[4], 1e-10);
  }
}

// ---------------------------------------------------------------------------
// E[max_t |W_t^{-1} T I_t h|^2 | x] / |h|^2_H across base paths.

void conditional_bound(Ctx& ctx) {
  const ModelKind kind = ctx.model(ModelKind::sphere_gradient);
  ctx.report.model = model_name(kind);
  const geometry::ModelPtr model = geometry::make_model(kind);
  const TimeGrid grid = ctx.grid(250);
  const int bases = ctx.paths(64), resamples = ctx.resamples(256);
  const CameronMartinVector h = test_directions(grid, model->noise_dim())[1];
  const auto ratios = parallel::map_indices<double>(bases, ctx.workers(), [&](long b) {
    const sde::SolutionPath base = sample_path(model, grid, ctx.seed(), b);
    const sde::NoiseSplit split = sde::decompose_noise(base);
    std::vector<double> norms(resamples);
    for (int r = 0; r < resamples; ++r) {
      const sde::Resampled res = sde::reconstruct_driver(base, split, sde::fresh_redundant(base, r));
      const transport::TransportFrame f = transport::transport_frames(res.path);
      const PathVectorField v = sde::bismut_derivative(res.path, h);
      // max_t |W_t^{-1} v_t|^2; frame coordinates at x_0 are orthonormal.
      double s = 0.0;
      for (int k = 0; k <= res.path.steps(); ++k)
        s = std::max(s, transport::damped_inverse_coords(res.path, f, k, v.values[k]).squaredNorm());
      norms[r] = s;
    }
    return stats::mean(norms) / h.norm_squared();
  });
  const double lo = *std::min_element(ratios.begin(), ratios.end());
  const double hi = *std::max_element(ratios.begin(), ratios.end());
  ctx.info("min-conditional-ratio", lo);
  ctx.info("max-conditional-ratio", hi);
  // The bound is one-sided; a wide spread is flagged, not failed.
  ctx.info("ratio-spread(max/min)", hi / lo);
  if (!(hi / lo <= 10.0)) ctx.note("flag: conditional ratio spread " + format_number(hi / lo) + " exceeds 10x");
  ctx.at_least("all-ratios-finite-positive", std::isfinite(hi) && lo > 0.0 ? 1.0 : 0.0, 1.0);
}

}  // namespace pathspace::harness::kit
