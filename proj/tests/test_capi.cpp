#include <doctest.h>

#include "pathspace/pathspace.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

TEST_CASE("config handles report errors through status codes") {
  ps_config* cfg = nullptr;
  REQUIRE(ps_config_create(&cfg) == PS_OK);
  CHECK(ps_config_set(cfg, "seed", "77") == PS_OK);
  CHECK(ps_config_seed(cfg) == 77);
  CHECK(ps_config_set(cfg, "bogus", "1") == PS_ERR_CONFIG);
  CHECK(std::strstr(ps_last_error(), "bogus") != nullptr);
  CHECK(ps_config_set(cfg, "format", "xml") == PS_OK);  // validated later
  CHECK(ps_config_validate(cfg) == PS_ERR_CONFIG);
  ps_report* r = nullptr;
  CHECK(ps_run_check(cfg, "lw-connection", &r) == PS_ERR_CONFIG);
  CHECK(ps_config_set(cfg, "format", "csv") == PS_OK);
  CHECK(ps_run_check(cfg, "no-such-check", &r) == PS_ERR_UNKNOWN_CHECK);
  CHECK(ps_config_load_file(cfg, "/nonexistent/file.cfg") == PS_ERR_CONFIG);
  CHECK(ps_config_set(nullptr, "seed", "1") == PS_ERR_INVALID_ARGUMENT);
  ps_config_destroy(cfg);
}

TEST_CASE("catalog is exposed") {
  REQUIRE(ps_check_count() >= 15);
  CHECK(std::string(ps_check_id(0)) == "lw-connection");
  CHECK(ps_check_id(ps_check_count()) == nullptr);
  CHECK(ps_sweep_count() >= 1);
}

TEST_CASE("run, inspect, emit and reload a report") {
  ps_config* cfg = nullptr;
  REQUIRE(ps_config_create(&cfg) == PS_OK);
  ps_report* r = nullptr;
  REQUIRE(ps_run_check(cfg, "lw-connection", &r) == PS_OK);
  CHECK(std::string(ps_report_check_id(r)) == "lw-connection");
  CHECK(ps_report_verdict(r) == 1);
  REQUIRE(ps_report_assertion_count(r) > 0);
  ps_assertion a{};
  REQUIRE(ps_report_assertion(r, 0, &a) == PS_OK);
  CHECK(a.pass == 1);
  CHECK(a.estimate <= a.tol);
  CHECK(ps_report_assertion(r, 1000, &a) == PS_ERR_INVALID_ARGUMENT);

  const auto dir = std::filesystem::temp_directory_path() / "pathspace_test_capi";
  std::filesystem::remove_all(dir);
  REQUIRE(ps_report_emit(r, dir.c_str()) == PS_OK);
  const std::string saved = ps_report_summary(r, "csv");
  ps_report* back = nullptr;
  REQUIRE(ps_report_load((dir / "lw-connection.json").c_str(), &back) == PS_OK);
  CHECK(std::string(ps_report_summary(back, "csv")) == saved);
  CHECK(std::string(ps_summary_header("csv")) == "check_id,verdict,n_assertions,n_pass,seed,wall_ms");
  CHECK(ps_report_load((dir / "missing.json").c_str(), &back) == PS_ERR_IO);
  ps_report_destroy(back);
  ps_report_destroy(r);
  ps_config_destroy(cfg);
}

TEST_CASE("simulated paths stay on the model") {
  ps_path* p = nullptr;
  REQUIRE(ps_path_simulate("sphere", 1.0, 200, 3, 0, &p) == PS_OK);
  CHECK(ps_path_steps(p) == 200);
  CHECK(ps_path_ambient_dim(p) == 3);
  CHECK(ps_path_noise_dim(p) == 3);
  CHECK(ps_path_time(p, 200) == doctest::Approx(1.0));
  std::vector<double> x(3);
  for (int k = 0; k <= 200; k += 50) {
    REQUIRE(ps_path_point(p, k, x.data(), x.size()) == PS_OK);
    CHECK(std::abs(std::hypot(x[0], x[1], x[2]) - 1.0) < 1e-12);
  }
  CHECK(ps_path_point(p, 201, x.data(), x.size()) == PS_ERR_INVALID_ARGUMENT);
  CHECK(ps_path_increment(p, 0, x.data(), 2) == PS_ERR_INVALID_ARGUMENT);
  ps_path_destroy(p);

  REQUIRE(ps_path_simulate("group", 1.0, 100, 3, 0, &p) == PS_OK);
  CHECK(ps_path_ambient_dim(p) == 9);
  ps_path_destroy(p);
  CHECK(ps_path_simulate("torus", 1.0, 100, 3, 0, &p) != PS_OK);
  CHECK(ps_path_simulate("sphere", 1.0, 0, 3, 0, &p) != PS_OK);
}
