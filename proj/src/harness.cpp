#include "pathspace/harness.hpp"

#include "check_kit.hpp"
#include "result_cache.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace pathspace::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(ErrorCode::config, "'" + key + "' expects an integer, got '" + value + "'");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double x = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size() || !std::isfinite(x))
    fail(ErrorCode::config, "'" + key + "' expects a finite number, got '" + value + "'");
  return x;
}

using Body = void (*)(kit::Ctx&);

struct Entry {
  const char* id;
  Body body;
};

void determinism_body(kit::Ctx& ctx);

const std::vector<Entry>& catalog() {
  static const std::vector<Entry> entries = {
      {"lw-connection", kit::lw_connection},
      {"ricci", kit::ricci},
      {"heat-moment", kit::heat_moment},
      {"transport-decay", kit::transport_decay},
      {"bismut-covariant", kit::bismut_covariant},
      {"intertwine-fd", kit::intertwine_fd},
      {"intertwine-group", kit::intertwine_group},
      {"filtering", kit::filtering},
      {"ibp", kit::ibp},
      {"pullback", kit::pullback},
      {"domination", kit::domination},
      {"chaos-identity", kit::chaos_identity},
      {"chaos-moment", kit::chaos_moment},
      {"cond-exp-martingale", kit::cond_exp_martingale},
      {"determinism", determinism_body},
      {"pullback-conditional", kit::pullback_conditional},
      {"noise-split", kit::noise_split},
      {"reconstruct", kit::reconstruct},
      {"projection", kit::projection},
      {"conditional-bound", kit::conditional_bound},
      {"wiener-moments", kit::wiener_moments},
  };
  return entries;
}

std::string json_number(double x) { return std::isfinite(x) ? format_number(x) : "null"; }

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

double read_number(const nlohmann::json& j) { return j.is_null() ? NAN : j.get<double>(); }

// Reduced configurations used to probe run-to-run and worker-count
// invariance without paying for the full suite three times.
std::vector<std::pair<std::string, ExperimentConfig>> determinism_probes(const ExperimentConfig& base) {
  auto with = [&](int steps, int paths, int resamples) {
    ExperimentConfig c = base;
    c.steps = steps;
    c.paths = paths;
    c.resamples = resamples;
    return c;
  };
  return {
      {"heat-moment", with(200, 4000, 0)},
      {"ibp", with(100, 2000, 0)},
      {"filtering", with(200, 4, 32)},
      {"pullback", with(400, 200, 0)},
      {"cond-exp-martingale", with(200, 4, 64)},
      {"chaos-moment", with(200, 4000, 0)},
      {"noise-split", with(50, 2000, 0)},
  };
}

double max_relative_difference(const CheckReport& a, const CheckReport& b) {
  if (a.assertions.size() != b.assertions.size()) return INFINITY;
  double worst = 0.0;
  auto cmp = [&](double x, double y) {
    if (std::isnan(x) && std::isnan(y)) return;
    if (x == y) return;
    worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::max(std::abs(x), std::abs(y))));
    if (!std::isfinite(worst)) worst = INFINITY;
  };
  for (std::size_t i = 0; i < a.assertions.size(); ++i) {
    const Assertion &p = a.assertions[i], &q = b.assertions[i];
    cmp(p.target, q.target);
    cmp(p.estimate, q.estimate);
    cmp(p.se, q.se);
    cmp(p.z, q.z);
    cmp(p.tol, q.tol);
    if (p.pass != q.pass || p.name != q.name) worst = INFINITY;
  }
  return worst;
}

void determinism_body(kit::Ctx& ctx) {
  ctx.report.model = "mixed";
  const cache::Bypass bypass;  // every run below recomputes from scratch
  int differing = 0;
  double worst = 0.0;
  for (auto [id, cfg] : determinism_probes(ctx.cfg)) {
    cfg.workers = 4;
    const CheckReport first = run_check(cfg, id);
    const CheckReport second = run_check(cfg, id);
    cfg.workers = 1;
    const CheckReport serial = run_check(cfg, id);
    const bool same = report_csv(first) == report_csv(second);
    const double diff = max_relative_difference(first, serial);
    if (!same) ++differing;
    worst = std::max(worst, diff);
    ctx.note(id + ": repeat " + (same ? "identical" : "DIFFERS") + ", 1 vs 4 workers max rel diff " +
             format_number(diff));
  }
  ctx.exact("repeat-runs-differing-reports", differing, 0.0);
  ctx.bound("workers-1-vs-4-max-rel-diff", worst, 1e-12);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) fail(ErrorCode::config, "horizon must be positive");
  if (steps < 0 || paths < 0 || resamples < 0) fail(ErrorCode::config, "steps, paths and resamples must be >= 0");
  if (levels < 3 || levels > 12) fail(ErrorCode::config, "levels must be in [3, 12]");
  if (workers < 0) fail(ErrorCode::config, "workers must be >= 0");
  if (!(tol_scale > 0.0) || !std::isfinite(tol_scale)) fail(ErrorCode::config, "tol_scale must be positive");
  if (format != "json" && format != "csv") fail(ErrorCode::config, "format must be json or csv");
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  for (char& c : key)
    if (c == '-') c = '_';
  const std::string value = trim(raw_value);
  if (key == "model") cfg.model = geometry::parse_model(value);
  else if (key == "horizon") cfg.horizon = parse_real(key, value);
  else if (key == "steps") cfg.steps = parse_integer<int>(key, value);
  else if (key == "paths") cfg.paths = parse_integer<int>(key, value);
  else if (key == "resamples") cfg.resamples = parse_integer<int>(key, value);
  else if (key == "levels") cfg.levels = parse_integer<int>(key, value);
  else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(key, value);
  else if (key == "workers") cfg.workers = parse_integer<int>(key, value);
  else if (key == "tol_scale") cfg.tol_scale = parse_real(key, value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "format") cfg.format = value;
  else fail(ErrorCode::config, "unknown config key '" + key + "'");
}

void load_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::config, "cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::config, path + ":" + std::to_string(lineno) + ": expected key = value");
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* s = std::getenv("PATHSPACE_SEED"); s && *s) cfg.seed = parse_integer<std::uint64_t>("PATHSPACE_SEED", s);
}

std::string model_name(geometry::ModelKind kind) {
  return kind == geometry::ModelKind::sphere_gradient ? "sphere" : "group";
}

int CheckReport::n_pass() const {
  int n = 0;
  for (const auto& a : assertions) n += a.pass ? 1 : 0;
  return n;
}

void CheckReport::finalize() {
  verdict = !assertions.empty() && n_pass() == static_cast<int>(assertions.size());
}

const std::vector<std::string>& check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& e : catalog()) out.emplace_back(e.id);
    return out;
  }();
  return ids;
}

bool is_check(const std::string& id) {
  for (const auto& e : catalog())
    if (id == e.id) return true;
  return false;
}

CheckReport run_check(const ExperimentConfig& cfg, const std::string& id) {
  cfg.validate();
  for (const auto& e : catalog()) {
    if (id != e.id) continue;
    CheckReport report;
    report.check_id = id;
    report.config = cfg;
    kit::Ctx ctx{cfg, report};
    const auto start = std::chrono::steady_clock::now();
    e.body(ctx);
    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    report.finalize();
    return report;
  }
  fail(ErrorCode::unknown_check, "unknown check '" + id + "'");
}

const std::vector<std::string>& sweep_ids() {
  static const std::vector<std::string> ids = {"bismut-covariant", "intertwine-group", "heat-moment", "pullback",
                                               "reconstruct"};
  return ids;
}

namespace {

kit::LevelErrors run_sweep(kit::Ctx& ctx, const std::string& id, int levels) {
  if (id == "bismut-covariant") return kit::sweep_bismut_covariant(ctx, levels);
  if (id == "intertwine-group") return kit::sweep_intertwine_group(ctx, levels);
  if (id == "heat-moment") return kit::sweep_heat_moment(ctx, levels);
  if (id == "pullback") return kit::sweep_pullback(ctx, levels);
  if (id == "reconstruct") return kit::sweep_reconstruct(ctx, levels);
  if (is_check(id)) fail(ErrorCode::unknown_check, "check '" + id + "' has no convergence sweep");
  fail(ErrorCode::unknown_check, "unknown check '" + id + "'");
}

// Expected order band for each sweep; reconstruct is exact.
std::pair<double, double> order_band(const std::string& id) {
  if (id == "heat-moment") return {0.8, 2.2};
  if (id == "pullback") return {0.4, INFINITY};
  return {0.8, INFINITY};
}

}  // namespace

SweepResult convergence_sweep(const ExperimentConfig& cfg, const std::string& id, int levels) {
  cfg.validate();
  if (levels < 3) fail(ErrorCode::config, "a sweep needs at least 3 levels");
  CheckReport scratch;
  kit::Ctx ctx{cfg, scratch};
  return kit::summarize(run_sweep(ctx, id, levels));
}

CheckReport sweep_report(const ExperimentConfig& cfg, const std::string& id, int levels) {
  cfg.validate();
  if (levels < 3) fail(ErrorCode::config, "a sweep needs at least 3 levels");
  CheckReport report;
  report.check_id = id + "-sweep";
  report.config = cfg;
  report.config.levels = levels;
  kit::Ctx ctx{cfg, report};
  const auto start = std::chrono::steady_clock::now();
  const kit::LevelErrors e = run_sweep(ctx, id, levels);
  const SweepResult s = kit::summarize(e);
  for (std::size_t l = 0; l < e.dt.size(); ++l)
    ctx.info("error/dt=" + format_number(e.dt[l]), e.error[l], e.error_se[l]);
  if (id == "reconstruct") {
    ctx.bound("max-deviation-all-levels", *std::max_element(e.worst.begin(), e.worst.end()), 1e-9);
    ctx.note(s.exact ? "reconstruction is exact at every level" : "reconstruction error above rounding");
  } else {
    const auto [lo, hi] = order_band(id);
    Assertion a{"order", lo, s.order, 0.0, 0.0, lo, false};
    a.pass = std::isfinite(s.order) && s.order >= lo && s.order <= hi;
    ctx.add(a);
    if (!s.monotone) ctx.note("errors are not monotone in dt; order undefined");
  }
  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  report.finalize();
  return report;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string report_json(const CheckReport& r) {
  std::ostringstream o;
  const ExperimentConfig& c = r.config;
  o << "{\n";
  o << "  \"check_id\": " << json_string(r.check_id) << ",\n";
  o << "  \"model\": " << json_string(r.model) << ",\n";
  o << "  \"verdict\": " << json_string(r.verdict ? "pass" : "fail") << ",\n";
  o << "  \"trivial\": " << (r.trivial ? "true" : "false") << ",\n";
  o << "  \"n_assertions\": " << r.assertions.size() << ",\n";
  o << "  \"n_pass\": " << r.n_pass() << ",\n";
  o << "  \"seed\": " << c.seed << ",\n";
  o << "  \"wall_ms\": " << json_number(r.wall_ms) << ",\n";
  o << "  \"config\": {\"model\": " << json_string(c.model ? model_name(*c.model) : "default")
    << ", \"horizon\": " << json_number(c.horizon) << ", \"steps\": " << c.steps << ", \"paths\": " << c.paths
    << ", \"resamples\": " << c.resamples << ", \"levels\": " << c.levels << ", \"workers\": " << c.workers
    << ", \"tol_scale\": " << json_number(c.tol_scale) << "},\n";
  o << "  \"notes\": [";
  for (std::size_t i = 0; i < r.notes.size(); ++i) o << (i ? ", " : "") << json_string(r.notes[i]);
  o << "],\n";
  o << "  \"assertions\": [";
  for (std::size_t i = 0; i < r.assertions.size(); ++i) {
    const Assertion& a = r.assertions[i];
    o << (i ? "," : "") << "\n    {\"name\": " << json_string(a.name) << ", \"target\": " << json_number(a.target)
      << ", \"estimate\": " << json_number(a.estimate) << ", \"se\": " << json_number(a.se)
      << ", \"z\": " << json_number(a.z) << ", \"tol\": " << json_number(a.tol)
      << ", \"pass\": " << (a.pass ? "true" : "false") << "}";
  }
  o << (r.assertions.empty() ? "]\n" : "\n  ]\n");
  o << "}\n";
  return o.str();
}

std::string report_csv(const CheckReport& r) {
  std::ostringstream o;
  o << "name,target,estimate,se,z,tol,pass\n";
  for (const Assertion& a : r.assertions) {
    o << a.name << ',' << format_number(a.target) << ',' << format_number(a.estimate) << ','
      << format_number(a.se) << ',' << format_number(a.z) << ',' << format_number(a.tol) << ','
      << (a.pass ? "true" : "false") << '\n';
  }
  return o.str();
}

std::string summary_header(const std::string& format) {
  return format == "csv" ? "check_id,verdict,n_assertions,n_pass,seed,wall_ms" : "";
}

std::string summary_row(const CheckReport& r, const std::string& format) {
  std::ostringstream o;
  if (format == "csv") {
    o << r.check_id << ',' << (r.verdict ? "pass" : "fail") << ',' << r.assertions.size() << ',' << r.n_pass()
      << ',' << r.config.seed << ',' << format_number(r.wall_ms);
  } else {
    o << "{\"check_id\": " << json_string(r.check_id) << ", \"verdict\": " << json_string(r.verdict ? "pass" : "fail")
      << ", \"n_assertions\": " << r.assertions.size() << ", \"n_pass\": " << r.n_pass()
      << ", \"seed\": " << r.config.seed << ", \"wall_ms\": " << json_number(r.wall_ms) << "}";
  }
  return o.str();
}

CheckReport parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::io_failure, std::string("malformed report: ") + e.what());
  }
  try {
    CheckReport r;
    r.check_id = j.at("check_id").get<std::string>();
    r.model = j.value("model", std::string{});
    r.trivial = j.value("trivial", false);
    r.wall_ms = read_number(j.at("wall_ms"));
    r.config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("config")) {
      const auto& c = j["config"];
      const std::string m = c.value("model", std::string("default"));
      if (m != "default") r.config.model = geometry::parse_model(m);
      r.config.horizon = read_number(c.at("horizon"));
      r.config.steps = c.value("steps", 0);
      r.config.paths = c.value("paths", 0);
      r.config.resamples = c.value("resamples", 0);
      r.config.levels = c.value("levels", 4);
      r.config.workers = c.value("workers", 0);
      r.config.tol_scale = read_number(c.at("tol_scale"));
    }
    for (const auto& n : j.value("notes", nlohmann::json::array())) r.notes.push_back(n.get<std::string>());
    for (const auto& a : j.at("assertions")) {
      r.assertions.push_back({a.at("name").get<std::string>(), read_number(a.at("target")),
                              read_number(a.at("estimate")), read_number(a.at("se")), read_number(a.at("z")),
                              read_number(a.at("tol")), a.at("pass").get<bool>()});
    }
    r.finalize();
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::io_failure, std::string("report is missing fields: ") + e.what());
  }
}

void emit_report(const CheckReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::io_failure, "cannot create output directory '" + dir + "': " + ec.message());
  const std::filesystem::path base = std::filesystem::path(dir) / report.check_id;
  for (const auto& [ext, text] : {std::pair{".json", report_json(report)}, std::pair{".csv", report_csv(report)}}) {
    const std::string path = base.string() + ext;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) fail(ErrorCode::io_failure, "cannot write '" + path + "'");
  }
}

}  // namespace pathspace::harness
