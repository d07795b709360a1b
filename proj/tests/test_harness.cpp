#include <doctest.h>

#include "pathspace/harness.hpp"
#include "pathspace/types.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace pathspace;
using namespace pathspace::harness;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ok;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pathspace_test_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("settings parse and validate") {
  ExperimentConfig c;
  apply_setting(c, " model ", " group ");
  apply_setting(c, "tol-scale", "2.5");
  apply_setting(c, "steps", "123");
  apply_setting(c, "seed", "18446744073709551615");
  CHECK(c.model == geometry::ModelKind::rotation_group);
  CHECK(c.tol_scale == 2.5);
  CHECK(c.steps == 123);
  CHECK(c.seed == ~std::uint64_t{0});
  CHECK(code_of([&] { apply_setting(c, "colour", "red"); }) == ErrorCode::config);
  CHECK(code_of([&] { apply_setting(c, "steps", "12x"); }) == ErrorCode::config);
  ExperimentConfig negative;
  apply_setting(negative, "steps", "-3");
  CHECK(code_of([&] { negative.validate(); }) == ErrorCode::config);
  CHECK(code_of([&] { apply_setting(c, "model", "torus"); }) != ErrorCode::ok);
  ExperimentConfig bad;
  bad.levels = 2;
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::config);
}

TEST_CASE("config file, then environment") {
  const auto dir = scratch("config");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# comment\n\nseed = 5   # trailing\npaths=17\nformat = csv\n";
  ExperimentConfig c;
  load_config_file(c, file.string());
  CHECK(c.seed == 5);
  CHECK(c.paths == 17);
  CHECK(c.format == "csv");
  setenv("PATHSPACE_SEED", "99", 1);
  apply_environment(c);
  unsetenv("PATHSPACE_SEED");
  CHECK(c.seed == 99);
  std::ofstream(dir / "broken.cfg") << "seed 5\n";
  CHECK(code_of([&] { load_config_file(c, (dir / "broken.cfg").string()); }) == ErrorCode::config);
  CHECK(code_of([&] { load_config_file(c, (dir / "missing.cfg").string()); }) == ErrorCode::config);
}

TEST_CASE("numbers carry 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("report json round trip") {
  CheckReport r;
  r.check_id = "demo";
  r.model = "sphere";
  r.config.seed = 42;
  r.config.steps = 10;
  r.config.model = geometry::ModelKind::sphere_gradient;
  r.assertions = {{"a", 1.0, 1.0 + 1e-16, 0.0, 0.0, 1e-12, true}, {"b", 0.0, NAN, 1.0, NAN, 4.0, false}};
  r.notes = {"with \"quotes\", commas"};
  r.wall_ms = 3.25;
  r.finalize();
  CHECK_FALSE(r.verdict);
  const CheckReport back = parse_report_json(report_json(r));
  CHECK(back.check_id == "demo");
  CHECK(back.config.seed == 42);
  CHECK(back.config.steps == 10);
  REQUIRE(back.assertions.size() == 2);
  CHECK(back.assertions[0].estimate == r.assertions[0].estimate);
  CHECK(std::isnan(back.assertions[1].estimate));
  CHECK(back.notes == r.notes);
  CHECK(back.verdict == r.verdict);
  CHECK(report_json(back) == report_json(r));
  CHECK(report_csv(back) == report_csv(r));
  CHECK(code_of([] { parse_report_json("{not json"); }) == ErrorCode::io_failure);
  CHECK(code_of([] { parse_report_json("{}"); }) == ErrorCode::io_failure);
}

TEST_CASE("summary rows and emitted files") {
  CheckReport r;
  r.check_id = "demo";
  r.config.seed = 7;
  r.assertions = {{"a", 0.0, 0.5, 0.0, 0.0, 1.0, true}};
  r.wall_ms = 1.5;
  r.finalize();
  CHECK(summary_header("csv") == "check_id,verdict,n_assertions,n_pass,seed,wall_ms");
  CHECK(summary_row(r, "csv") == "demo,pass,1,1,7,1.5");
  CHECK(summary_row(r, "json") ==
        "{\"check_id\": \"demo\", \"verdict\": \"pass\", \"n_assertions\": 1, \"n_pass\": 1, \"seed\": 7, "
        "\"wall_ms\": 1.5}");
  const auto dir = scratch("emit");
  emit_report(r, dir.string());
  std::ifstream csv(dir / "demo.csv");
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(header == "name,target,estimate,se,z,tol,pass");
  CHECK(row == "a,0,0.5,0,0,1,true");
  CHECK(std::filesystem::exists(dir / "demo.json"));
}

TEST_CASE("catalog and dispatch errors") {
  CHECK(check_ids().size() >= 15);
  CHECK(check_ids()[0] == "lw-connection");
  CHECK(is_check("determinism"));
  CHECK_FALSE(is_check("nope"));
  ExperimentConfig c;
  CHECK(code_of([&] { run_check(c, "nope"); }) == ErrorCode::unknown_check);
  CHECK(code_of([&] { sweep_report(c, "chaos-identity", 4); }) != ErrorCode::ok);
  CHECK(code_of([&] { sweep_report(c, "reconstruct", 2); }) != ErrorCode::ok);
}

TEST_CASE("sweep of an exact identity is flagged exact") {
  ExperimentConfig c;
  c.steps = 64;
  c.paths = 2;
  const SweepResult s = convergence_sweep(c, "reconstruct", 3);
  CHECK(s.exact);
  CHECK(s.dt.size() == 3);
  CHECK(std::isnan(s.order));
}

TEST_CASE("a fast check runs and reproduces") {
  ExperimentConfig c;
  const CheckReport a = run_check(c, "lw-connection");
  const CheckReport b = run_check(c, "lw-connection");
  CHECK(a.verdict);
  CHECK(report_csv(a) == report_csv(b));
}
