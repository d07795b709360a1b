// Command-line front end. Talks to the library only through the C API.
//
// Exit codes: 0 every check passed, 1 a check failed (or could not finish
// numerically), 2 usage, configuration or I/O error.

#include "pathspace/pathspace.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct ConfigDeleter {
  void operator()(ps_config* c) const { ps_config_destroy(c); }
};
struct ReportDeleter {
  void operator()(ps_report* r) const { ps_report_destroy(r); }
};
struct PathDeleter {
  void operator()(ps_path* p) const { ps_path_destroy(p); }
};
using Config = std::unique_ptr<ps_config, ConfigDeleter>;
using Report = std::unique_ptr<ps_report, ReportDeleter>;
using Path = std::unique_ptr<ps_path, PathDeleter>;

int exit_code_for(ps_status s) {
  switch (s) {
    case PS_OK: return kPass;
    case PS_ERR_CONFIG:
    case PS_ERR_UNKNOWN_CHECK:
    case PS_ERR_IO:
    case PS_ERR_INVALID_ARGUMENT: return kUsage;
    default: return kFail;
  }
}

int report_error(ps_status s) {
  std::fprintf(stderr, "pathspace: %s\n", ps_last_error());
  return exit_code_for(s);
}

struct Flags {
  std::string config_file;
  std::optional<std::string> model, steps, paths, resamples, seed, out, format, tol_scale, levels, workers, horizon;
};

void add_flags(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config_file, "key = value config file");
  app.add_option("--model", f.model, "sphere | group")->check(CLI::IsMember({"sphere", "group"}));
  app.add_option("--steps", f.steps, "time steps (finest level for sweeps)");
  app.add_option("--paths", f.paths, "sample paths (base paths for conditional checks)");
  app.add_option("--resamples", f.resamples, "redundant-noise resamples per base path");
  app.add_option("--seed", f.seed, "master seed (PATHSPACE_SEED overrides)");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--format", f.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol-scale", f.tol_scale, "multiplier on tolerances");
  app.add_option("--levels", f.levels, "levels in a convergence sweep");
  app.add_option("--workers", f.workers, "worker threads (0 = all cores)");
  app.add_option("--horizon", f.horizon, "time horizon T");
}

ps_status build_config(const Flags& f, Config& cfg) {
  ps_config* raw = nullptr;
  if (ps_status s = ps_config_create(&raw); s != PS_OK) return s;
  cfg.reset(raw);
  if (!f.config_file.empty())
    if (ps_status s = ps_config_load_file(raw, f.config_file.c_str()); s != PS_OK) return s;
  const std::pair<const char*, const std::optional<std::string>*> settings[] = {
      {"model", &f.model},         {"steps", &f.steps},     {"paths", &f.paths},
      {"resamples", &f.resamples}, {"seed", &f.seed},       {"out", &f.out},
      {"format", &f.format},       {"tol_scale", &f.tol_scale}, {"levels", &f.levels},
      {"workers", &f.workers},     {"horizon", &f.horizon},
  };
  for (const auto& [key, value] : settings)
    if (*value)
      if (ps_status s = ps_config_set(raw, key, (*value)->c_str()); s != PS_OK) return s;
  if (ps_status s = ps_config_apply_env(raw); s != PS_OK) return s;
  return ps_config_validate(raw);
}

// Emits the report files and prints its summary row; returns its verdict.
int publish(ps_config* cfg, ps_report* report, bool header) {
  if (ps_status s = ps_report_emit(report, ps_config_out_dir(cfg)); s != PS_OK) return report_error(s);
  const char* fmt = ps_config_format(cfg);
  if (header && std::string(fmt) == "csv") std::printf("%s\n", ps_summary_header(fmt));
  std::printf("%s\n", ps_report_summary(report, fmt));
  std::fflush(stdout);
  return ps_report_verdict(report) ? kPass : kFail;
}

int run_one(ps_config* cfg, const std::string& id, bool header) {
  ps_report* raw = nullptr;
  if (ps_status s = ps_run_check(cfg, id.c_str(), &raw); s != PS_OK) return report_error(s);
  Report report(raw);
  return publish(cfg, report.get(), header);
}

int cmd_simulate(ps_config* cfg) {
  const std::string model = *ps_config_model(cfg) ? ps_config_model(cfg) : "sphere";
  const int steps = ps_config_steps(cfg) > 0 ? ps_config_steps(cfg) : 1000;
  const int paths = ps_config_paths(cfg) > 0 ? ps_config_paths(cfg) : 4;
  const double horizon = ps_config_horizon(cfg);
  const std::filesystem::path dir = ps_config_out_dir(cfg);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const bool csv = std::string(ps_config_format(cfg)) == "csv";
  const std::filesystem::path file = dir / (csv ? "simulate.csv" : "simulate.json");
  std::ofstream out(file);
  if (!out) {
    std::fprintf(stderr, "pathspace: cannot write %s\n", file.c_str());
    return kUsage;
  }
  char num[40];
  auto fmt = [&](double x) {
    std::snprintf(num, sizeof num, "%.17g", x);
    return std::string(num);
  };
  if (csv) out << "path,k,t,coords\n";
  else out << "{\"model\": \"" << model << "\", \"seed\": " << ps_config_seed(cfg) << ", \"paths\": [";
  for (int i = 0; i < paths; ++i) {
    ps_path* raw = nullptr;
    if (ps_status s = ps_path_simulate(model.c_str(), horizon, steps, ps_config_seed(cfg), i, &raw); s != PS_OK)
      return report_error(s);
    Path p(raw);
    const int d = ps_path_ambient_dim(p.get());
    std::vector<double> x(d);
    if (!csv) out << (i ? ", " : "") << "[";
    for (int k = 0; k <= ps_path_steps(p.get()); ++k) {
      ps_path_point(p.get(), k, x.data(), x.size());
      if (csv) {
        out << i << ',' << k << ',' << fmt(ps_path_time(p.get(), k)) << ',';
        for (int j = 0; j < d; ++j) out << (j ? " " : "") << fmt(x[j]);
        out << '\n';
      } else {
        out << (k ? ", " : "") << "[";
        for (int j = 0; j < d; ++j) out << (j ? ", " : "") << fmt(x[j]);
        out << "]";
      }
    }
    if (!csv) out << "]";
  }
  if (!csv) out << "]}\n";
  std::printf("%s\n", file.c_str());
  return out ? kPass : kUsage;
}

int cmd_suite(ps_config* cfg) {
  int worst = kPass;
  for (size_t i = 0; i < ps_check_count(); ++i) {
    const int rc = run_one(cfg, ps_check_id(i), i == 0);
    if (rc == kUsage) return rc;
    worst = std::max(worst, rc);
  }
  return worst;
}

int cmd_sweep(ps_config* cfg, const std::string& id) {
  ps_report* raw = nullptr;
  if (ps_status s = ps_run_sweep(cfg, id.c_str(), ps_config_levels(cfg), &raw); s != PS_OK) return report_error(s);
  Report report(raw);
  return publish(cfg, report.get(), true);
}

// Re-emits every stored report in the output directory.
int cmd_report(ps_config* cfg) {
  const std::filesystem::path dir = ps_config_out_dir(cfg);
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    std::fprintf(stderr, "pathspace: no output directory %s\n", dir.c_str());
    return kUsage;
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json" && entry.path().stem() != "simulate") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    std::fprintf(stderr, "pathspace: no reports in %s\n", dir.c_str());
    return kUsage;
  }
  int worst = kPass;
  bool header = true;
  for (const auto& file : files) {
    ps_report* raw = nullptr;
    if (ps_status s = ps_report_load(file.c_str(), &raw); s != PS_OK) return report_error(s);
    Report report(raw);
    const int rc = publish(cfg, report.get(), header);
    header = false;
    if (rc == kUsage) return rc;
    worst = std::max(worst, rc);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-space calculus experiments on the sphere and SO(3)"};
  app.require_subcommand(1);
  Flags flags;
  add_flags(app, flags);
  std::string check_id, sweep_id;
  auto* simulate = app.add_subcommand("simulate", "write sample paths to <out>/simulate.{json,csv}");
  auto* check = app.add_subcommand("check", "run one check");
  check->add_option("id", check_id, "check id")->required();
  auto* suite = app.add_subcommand("suite", "run every check");
  auto* sweep = app.add_subcommand("sweep", "coupled dt-halving convergence sweep");
  sweep->add_option("id", sweep_id, "check id with a sweep")->required();
  auto* report = app.add_subcommand("report", "re-emit stored reports from <out>");
  for (auto* sub : {simulate, check, suite, sweep, report}) sub->fallthrough();
  auto* list = app.add_subcommand("list", "list check and sweep ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kPass : kUsage;
  }

  if (list->parsed()) {
    for (size_t i = 0; i < ps_check_count(); ++i) std::printf("check %s\n", ps_check_id(i));
    for (size_t i = 0; i < ps_sweep_count(); ++i) std::printf("sweep %s\n", ps_sweep_id(i));
    return kPass;
  }

  Config cfg;
  if (ps_status s = build_config(flags, cfg); s != PS_OK) return report_error(s);

  if (simulate->parsed()) return cmd_simulate(cfg.get());
  if (check->parsed()) return run_one(cfg.get(), check_id, true);
  if (suite->parsed()) return cmd_suite(cfg.get());
  if (sweep->parsed()) return cmd_sweep(cfg.get(), sweep_id);
  if (report->parsed()) return cmd_report(cfg.get());
  return kUsage;
}
