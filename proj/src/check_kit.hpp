#pragma once

// Internal helpers shared by the check implementations: the run context,
// assertion builders, and the fixed test functions and directions.

#include "pathspace/harness.hpp"
#include "pathspace/parallel.hpp"
#include "pathspace/path_space.hpp"
#include "pathspace/stats.hpp"

#include <string>
#include <vector>

namespace pathspace::harness::kit {

using geometry::ModelKind;

struct Ctx {
  const ExperimentConfig& cfg;
  CheckReport& report;

  int steps(int fallback) const { return cfg.steps > 0 ? cfg.steps : fallback; }
  int paths(int fallback) const { return cfg.paths > 0 ? cfg.paths : fallback; }
  int resamples(int fallback) const { return cfg.resamples > 0 ? cfg.resamples : fallback; }
  int workers() const { return cfg.workers; }
  double scale() const { return cfg.tol_scale; }
  std::uint64_t seed() const { return cfg.seed; }
  ModelKind model(ModelKind fallback) const { return cfg.model.value_or(fallback); }
  /// Both models unless one was selected.
  std::vector<ModelKind> models() const;
  TimeGrid grid(int fallback_steps) const { return TimeGrid::make(cfg.horizon, steps(fallback_steps)); }

  void note(const std::string& text) { report.notes.push_back(text); }
  void add(Assertion a) { report.assertions.push_back(std::move(a)); }

  /// |error| <= tol * tol_scale.
  void bound(const std::string& name, double error, double tol);
  /// Exact statement: passes iff |estimate - target| <= 1e-12 max(1, |target|).
  void exact(const std::string& name, double estimate, double target);
  /// |z| <= z_max * tol_scale, z from the estimate's standard error.
  void statistical(const std::string& name, const stats::EstimateWithCI& e, double z_max);
  /// |mean - target| <= tol_scale * (z_max se + bias); tol holds the bound.
  void biased(const std::string& name, const stats::EstimateWithCI& e, double z_max, double bias);
  /// estimate >= threshold (thresholds on rates and fractions are not scaled).
  void at_least(const std::string& name, double estimate, double threshold);
  /// Reported value with no pass criterion of its own.
  void info(const std::string& name, double estimate, double se = 0.0);
};

std::string label(const std::string& base, ModelKind kind);

/// Deterministic unit-ish vector of length d, distinct for each `which`.
Vec fixed_vector(int d, int which);

/// The three cylindrical test functions on a grid, for ambient dimension d.
std::vector<paths::CylindricalFunction> test_functions(const TimeGrid& grid, int d);
/// The three Cameron-Martin test directions in R^m.
std::vector<CameronMartinVector> test_directions(const TimeGrid& grid, int m);

/// Smooth node field alpha_t = P_x(c) cos t used to build one-forms.
std::vector<Vec> test_alpha(const sde::SolutionPath& path);
paths::HOneForm test_form(const sde::SolutionPath& path, const paths::TransportFrame& frame);

/// Fraction of |z| <= z_max.
double fraction_within(const std::vector<double>& zs, double z_max);

sde::SolutionPath sample_path(geometry::ModelPtr model, const TimeGrid& grid, std::uint64_t seed,
                              std::uint64_t index);

/// Coupled drivers for one path: level 0 sampled at coarse_steps, each next
/// level a bridge refinement of the previous one.
std::vector<BrownianDriver> coupled_levels(double horizon, int coarse_steps, int levels, int dim,
                                           std::uint64_t seed, std::uint64_t path);

// Check bodies. Each fills ctx.report.
void lw_connection(Ctx& ctx);
void ricci(Ctx& ctx);
void heat_moment(Ctx& ctx);
void transport_decay(Ctx& ctx);
void bismut_covariant(Ctx& ctx);
void intertwine_fd(Ctx& ctx);
void intertwine_group(Ctx& ctx);
void filtering(Ctx& ctx);
void ibp(Ctx& ctx);
void pullback(Ctx& ctx);
void domination(Ctx& ctx);
void chaos_identity(Ctx& ctx);
void chaos_moment(Ctx& ctx);
void cond_exp_martingale(Ctx& ctx);
void pullback_conditional(Ctx& ctx);
void noise_split(Ctx& ctx);
void reconstruct(Ctx& ctx);
void projection(Ctx& ctx);
void conditional_bound(Ctx& ctx);
void wiener_moments(Ctx& ctx);

// Sweeps: per-level mean errors on coupled drivers.
struct LevelErrors {
  std::vector<double> dt;
  std::vector<double> error;     // mean over paths
  std::vector<double> error_se;  // standard error of that mean
  std::vector<double> worst;     // max over paths
  std::vector<double> finest;    // per-path error at the finest level
};

/// Collects per-path, per-level errors into LevelErrors.
LevelErrors collect(const std::vector<double>& dt, const std::vector<std::vector<double>>& per_path);
/// Finest step count split into `levels` halvings; throws when not divisible.
int coarse_steps(int finest, int levels);

LevelErrors sweep_bismut_covariant(const Ctx& ctx, int levels);
LevelErrors sweep_intertwine_group(const Ctx& ctx, int levels);
LevelErrors sweep_heat_moment(const Ctx& ctx, int levels);
LevelErrors sweep_pullback(const Ctx& ctx, int levels);
LevelErrors sweep_reconstruct(const Ctx& ctx, int levels);

SweepResult summarize(const LevelErrors& e);

}  // namespace pathspace::harness::kit
