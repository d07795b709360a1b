// Acceptance run: one line per criterion.
//
//   test_acceptance            all fifteen criteria
//   test_acceptance 3 7        selected criteria
//
// Each criterion runs its catalog check at default sizes and the default
// master seed. The exit status is 0 only if every selected criterion passes.
// Runtime budgets in the catalog assume a 4-core desktop; the elapsed time is
// printed next to the budget but does not decide the verdict.

#include "pathspace/harness.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

using pathspace::harness::CheckReport;
using pathspace::harness::ExperimentConfig;

struct Criterion {
  int number;
  const char* check_id;
  const char* statement;
  double budget_s;
};

const Criterion kCriteria[] = {
    {1, "lw-connection", "nabla_v X^e = 0 for e orthogonal to ker X, closed form vs FD < 1e-6", 1},
    {2, "ricci", "sphere Ric = id within 1e-4 of the FD curvature trace; group Ric = 0", 5},
    {3, "heat-moment", "E<x_1,x_0> = e^-1 within 3 SE + 5 dt, 1e5 paths, dt = 1e-3", 30},
    {4, "transport-decay", "sup_t | |W_t v| e^{t/2} / |v| - 1 | < 1e-8 on 32 paths", 5},
    {5, "bismut-covariant", "4-level sweep order >= 0.8, sup error < 1e-2 at dt = 1e-4, 8 seeds", 60},
    {6, "intertwine-fd", "|d_H f(TI h) - FD(f o I)(h)| < 1e-3, 3 f x 3 h, 8 seeds", 60},
    {7, "intertwine-group", "group TI(h) vs X(h) sup error < 10 dt, sweep order >= 0.8", 30},
    {8, "filtering", "64 x 512 resamples, filtered z within 4 at T/4, T/2, T, >= 95% pass", 180},
    {9, "ibp", "E[d_H f(X h)] = E[f int<h', dB>] within 3 SE, 1e5 paths, sphere and group", 120},
    {10, "pullback", "pull-back vs direct pairing, order >= 0.4, 1e4 paths", 120},
    {11, "domination", "|phi(X h)| <= |I*(phi)(h)| + 3 SE in L2", 120},
    {12, "chaos-identity", "chaos remainder identity for B_T^2 (4 = 4) and B_T^3", 30},
    {13, "chaos-moment", "E[I_2(1)^2] = 2 within 3 SE, 1e5 paths", 10},
    {14, "cond-exp-martingale", "conditional exponential martingale z-test, >= 95% of 32 bases", 120},
    {15, "determinism", "identical repeat runs; 1 vs 4 workers agree to 1e-12", 60},
};

void print_failures(const CheckReport& r) {
  for (const auto& a : r.assertions)
    if (!a.pass)
      std::printf("    failed %s: estimate %.6g target %.6g se %.3g z %.3g tol %.3g\n", a.name.c_str(), a.estimate,
                  a.target, a.se, a.z, a.tol);
  for (const auto& n : r.notes) std::printf("    note: %s\n", n.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 15) {
      std::fprintf(stderr, "usage: %s [criterion 1..15 ...]\n", argv[0]);
      return 2;
    }
    selected.push_back(n);
  }
  if (selected.empty())
    for (const auto& c : kCriteria) selected.push_back(c.number);

  ExperimentConfig cfg;
  int failures = 0;
  for (int n : selected) {
    const Criterion& c = kCriteria[n - 1];
    bool pass = false;
    CheckReport report;
    std::string error;
    try {
      report = pathspace::harness::run_check(cfg, c.check_id);
      pass = report.verdict;
    } catch (const std::exception& e) {
      error = e.what();
    }
    if (!pass) ++failures;
    std::printf("[%s] criterion %d %s: %s (%d/%zu assertions, %.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", n,
                c.check_id, c.statement, report.n_pass(), report.assertions.size(), report.wall_ms / 1000.0,
                c.budget_s);
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    if (!pass) print_failures(report);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
