#include "pathspace/pathspace.h"

#include "pathspace/harness.hpp"
#include "pathspace/sde.hpp"

#include <fstream>
#include <new>
#include <sstream>
#include <string>

using namespace pathspace;

struct ps_config {
  harness::ExperimentConfig cfg;
};

struct ps_report {
  harness::CheckReport report;
  std::string summary;
};

struct ps_path {
  sde::SolutionPath path;
};

namespace {

thread_local std::string last_error;

ps_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return PS_OK;
    case ErrorCode::invalid_argument: return PS_ERR_INVALID_ARGUMENT;
    case ErrorCode::constraint_violation: return PS_ERR_CONSTRAINT;
    case ErrorCode::not_tangent: return PS_ERR_NOT_TANGENT;
    case ErrorCode::numerical_failure: return PS_ERR_NUMERICAL;
    case ErrorCode::divergence: return PS_ERR_DIVERGENCE;
    case ErrorCode::unknown_check: return PS_ERR_UNKNOWN_CHECK;
    case ErrorCode::io_failure: return PS_ERR_IO;
    case ErrorCode::config: return PS_ERR_CONFIG;
  }
  return PS_ERR_INTERNAL;
}

template <class F>
ps_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PS_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PS_ERR_INTERNAL;
  }
}

ps_status null_argument(const char* what) {
  last_error = std::string("null argument: ") + what;
  return PS_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* ps_last_error(void) { return last_error.c_str(); }
const char* ps_version(void) { return "1.0.0"; }

ps_status ps_config_create(ps_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] { *out = new ps_config{}; });
}

void ps_config_destroy(ps_config* cfg) { delete cfg; }

ps_status ps_config_set(ps_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return null_argument("cfg/key/value");
  return guarded([&] { harness::apply_setting(cfg->cfg, key, value); });
}

ps_status ps_config_load_file(ps_config* cfg, const char* path) {
  if (!cfg || !path) return null_argument("cfg/path");
  return guarded([&] { harness::load_config_file(cfg->cfg, path); });
}

ps_status ps_config_apply_env(ps_config* cfg) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] { harness::apply_environment(cfg->cfg); });
}

ps_status ps_config_validate(const ps_config* cfg) {
  if (!cfg) return null_argument("cfg");
  return guarded([&] { cfg->cfg.validate(); });
}

uint64_t ps_config_seed(const ps_config* cfg) { return cfg ? cfg->cfg.seed : 0; }
const char* ps_config_out_dir(const ps_config* cfg) { return cfg ? cfg->cfg.out_dir.c_str() : ""; }
const char* ps_config_format(const ps_config* cfg) { return cfg ? cfg->cfg.format.c_str() : ""; }
int ps_config_levels(const ps_config* cfg) { return cfg ? cfg->cfg.levels : 0; }
const char* ps_config_model(const ps_config* cfg) {
  if (!cfg || !cfg->cfg.model) return "";
  return *cfg->cfg.model == geometry::ModelKind::sphere_gradient ? "sphere" : "group";
}
int ps_config_steps(const ps_config* cfg) { return cfg ? cfg->cfg.steps : 0; }
int ps_config_paths(const ps_config* cfg) { return cfg ? cfg->cfg.paths : 0; }
double ps_config_horizon(const ps_config* cfg) { return cfg ? cfg->cfg.horizon : 0.0; }

size_t ps_check_count(void) { return harness::check_ids().size(); }
const char* ps_check_id(size_t index) {
  const auto& ids = harness::check_ids();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}
size_t ps_sweep_count(void) { return harness::sweep_ids().size(); }
const char* ps_sweep_id(size_t index) {
  const auto& ids = harness::sweep_ids();
  return index < ids.size() ? ids[index].c_str() : nullptr;
}

ps_status ps_run_check(const ps_config* cfg, const char* check_id, ps_report** out) {
  if (!cfg || !check_id || !out) return null_argument("cfg/check_id/out");
  return guarded([&] { *out = new ps_report{harness::run_check(cfg->cfg, check_id), {}}; });
}

ps_status ps_run_sweep(const ps_config* cfg, const char* check_id, int levels, ps_report** out) {
  if (!cfg || !check_id || !out) return null_argument("cfg/check_id/out");
  return guarded([&] { *out = new ps_report{harness::sweep_report(cfg->cfg, check_id, levels), {}}; });
}

ps_status ps_report_load(const char* json_path, ps_report** out) {
  if (!json_path || !out) return null_argument("json_path/out");
  return guarded([&] {
    std::ifstream in(json_path, std::ios::binary);
    if (!in) fail(ErrorCode::io_failure, std::string("cannot read '") + json_path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    *out = new ps_report{harness::parse_report_json(text.str()), {}};
  });
}

void ps_report_destroy(ps_report* report) { delete report; }

const char* ps_report_check_id(const ps_report* r) { return r ? r->report.check_id.c_str() : ""; }
int ps_report_verdict(const ps_report* r) { return r && r->report.verdict ? 1 : 0; }
int ps_report_trivial(const ps_report* r) { return r && r->report.trivial ? 1 : 0; }
double ps_report_wall_ms(const ps_report* r) { return r ? r->report.wall_ms : 0.0; }
size_t ps_report_assertion_count(const ps_report* r) { return r ? r->report.assertions.size() : 0; }

ps_status ps_report_assertion(const ps_report* r, size_t index, ps_assertion* out) {
  if (!r || !out) return null_argument("report/out");
  if (index >= r->report.assertions.size()) {
    last_error = "assertion index out of range";
    return PS_ERR_INVALID_ARGUMENT;
  }
  const auto& a = r->report.assertions[index];
  *out = {a.name.c_str(), a.target, a.estimate, a.se, a.z, a.tol, a.pass ? 1 : 0};
  return PS_OK;
}

size_t ps_report_note_count(const ps_report* r) { return r ? r->report.notes.size() : 0; }
const char* ps_report_note(const ps_report* r, size_t index) {
  return r && index < r->report.notes.size() ? r->report.notes[index].c_str() : nullptr;
}

ps_status ps_report_emit(const ps_report* r, const char* dir) {
  if (!r || !dir) return null_argument("report/dir");
  return guarded([&] { harness::emit_report(r->report, dir); });
}

const char* ps_report_summary(ps_report* r, const char* format) {
  if (!r) return "";
  r->summary = harness::summary_row(r->report, format ? format : "json");
  return r->summary.c_str();
}

const char* ps_summary_header(const char* format) {
  static const std::string csv = harness::summary_header("csv");
  return format && std::string(format) == "csv" ? csv.c_str() : "";
}

ps_status ps_path_simulate(const char* model, double horizon, int steps, uint64_t seed, uint64_t index,
                           ps_path** out) {
  if (!model || !out) return null_argument("model/out");
  return guarded([&] {
    const auto m = geometry::make_model(geometry::parse_model(model));
    const TimeGrid grid = TimeGrid::make(horizon, steps);
    const Vec x0 = m->base_point();
    const int dim = m->noise_dim();
    *out = new ps_path{sde::integrate(m, x0, sample_driver(grid, dim, seed, index))};
  });
}

void ps_path_destroy(ps_path* path) { delete path; }
int ps_path_steps(const ps_path* p) { return p ? p->path.steps() : 0; }
int ps_path_ambient_dim(const ps_path* p) { return p ? p->path.model->ambient_dim() : 0; }
int ps_path_noise_dim(const ps_path* p) { return p ? p->path.model->noise_dim() : 0; }
double ps_path_time(const ps_path* p, int k) { return p ? p->path.grid().time(k) : 0.0; }

ps_status ps_path_point(const ps_path* p, int k, double* out, size_t len) {
  if (!p || !out) return null_argument("path/out");
  if (k < 0 || k > p->path.steps() || len < static_cast<size_t>(p->path.model->ambient_dim())) {
    last_error = "node index or buffer length out of range";
    return PS_ERR_INVALID_ARGUMENT;
  }
  const Vec& x = p->path.points[k];
  for (int i = 0; i < x.size(); ++i) out[i] = x[i];
  return PS_OK;
}

ps_status ps_path_increment(const ps_path* p, int k, double* out, size_t len) {
  if (!p || !out) return null_argument("path/out");
  if (k < 0 || k >= p->path.steps() || len < static_cast<size_t>(p->path.model->noise_dim())) {
    last_error = "cell index or buffer length out of range";
    return PS_ERR_INVALID_ARGUMENT;
  }
  const Vec& b = p->path.driver.increments[k];
  for (int i = 0; i < b.size(); ++i) out[i] = b[i];
  return PS_OK;
}

}  // extern "C"
