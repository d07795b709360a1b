#pragma once

// Experiment configuration, the check catalog, convergence sweeps and report
// serialisation.
//
// Config file format: one `key = value` per line, `#` starts a comment, blank
// lines ignored. Keys: model (sphere|group), horizon, steps, paths,
// resamples, seed, levels, workers, tol_scale, out, format (json|csv).
// Precedence: built-in defaults < config file < command-line flags <
// PATHSPACE_SEED (seed only).

#include "pathspace/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pathspace::harness {

struct ExperimentConfig {
  std::optional<geometry::ModelKind> model;  // unset: each check's natural model
  double horizon = 1.0;
  int steps = 0;      // 0: per-check default
  int paths = 0;      // 0: per-check default
  int resamples = 0;  // 0: per-check default
  int levels = 4;
  std::uint64_t seed = 20240601;
  int workers = 0;    // 0: hardware concurrency
  double tol_scale = 1.0;
  std::string out_dir = "out";
  std::string format = "json";

  void validate() const;
};

/// Applies one key = value setting; throws Error(config) on bad input.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void load_config_file(ExperimentConfig& cfg, const std::string& path);
/// PATHSPACE_SEED, when set, replaces the seed.
void apply_environment(ExperimentConfig& cfg);
std::string model_name(geometry::ModelKind kind);

struct Assertion {
  std::string name;
  double target = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double z = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct CheckReport {
  std::string check_id;
  ExperimentConfig config;
  std::string model;
  std::vector<Assertion> assertions;
  std::vector<std::string> notes;
  double wall_ms = 0.0;
  bool trivial = false;  // the check is vacuous on the selected model
  bool verdict = false;

  int n_pass() const;
  void finalize();  // verdict = all assertions pass (and at least one exists)
};

/// Every check id understood by run_check, in suite order.
const std::vector<std::string>& check_ids();
bool is_check(const std::string& id);

CheckReport run_check(const ExperimentConfig& cfg, const std::string& id);

/// Check ids with a convergence sweep.
const std::vector<std::string>& sweep_ids();

struct SweepResult {
  std::vector<double> dt;
  std::vector<double> error;
  double order = 0.0;
  bool exact = false;     // all errors at rounding level
  bool monotone = true;
};

/// Least-squares order from coupled (bridge-refined) drivers; at least 3 levels.
SweepResult convergence_sweep(const ExperimentConfig& cfg, const std::string& id, int levels);
/// The sweep packaged as a report, one row per level plus the order.
CheckReport sweep_report(const ExperimentConfig& cfg, const std::string& id, int levels);

/// Decimal with 17 significant digits; non-finite values as "nan"/"inf"/"-inf".
std::string format_number(double x);

std::string report_json(const CheckReport& report);
std::string report_csv(const CheckReport& report);
/// Summary row: check_id, verdict, n_assertions, n_pass, seed, wall_ms.
std::string summary_header(const std::string& format);
std::string summary_row(const CheckReport& report, const std::string& format);
CheckReport parse_report_json(const std::string& text);

/// Writes <dir>/<check_id>.json and <dir>/<check_id>.csv.
void emit_report(const CheckReport& report, const std::string& dir);

}  // namespace pathspace::harness
