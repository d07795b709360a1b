#include <doctest.h>

#include "pathspace/wiener.hpp"

#include <cmath>

using namespace pathspace;
using namespace pathspace::wiener;

TEST_CASE("Hermite expansion of monomials") {
  const std::vector<double> c4 = hermite_expansion(4);
  REQUIRE(c4.size() == 5);
  CHECK(c4[0] == 3.0);
  CHECK(c4[1] == 0.0);
  CHECK(c4[2] == 6.0);
  CHECK(c4[3] == 0.0);
  CHECK(c4[4] == 1.0);
}

TEST_CASE("remainder identity closed forms") {
  const ChaosIdentityReport sq = chaos_remainder_identity_check(2, 1, 1.0, 1000, 3);
  CHECK(std::abs(sq.lhs - 4.0) < 1e-12);
  CHECK(sq.residual < 1e-12);
  for (double T : {0.5, 1.0, 2.0}) {
    const ChaosIdentityReport cube = chaos_remainder_identity_check(3, 1, T, 100, 3);
    CHECK(std::abs(cube.lhs - 18.0 * T * T * T) < 1e-12 * cube.lhs);
    CHECK(cube.residual < 1e-12 * cube.lhs);
  }
  const ChaosIdentityReport none = chaos_remainder_identity_check(2, 2, 1.0, 100, 3);
  CHECK(none.lhs == 0.0);
  CHECK(none.rhs == 0.0);
  const ChaosIdentityReport deep = chaos_remainder_identity_check(5, 2, 1.5, 100, 3);
  CHECK(deep.residual < 1e-10 * deep.lhs);
  CHECK_THROWS_AS(chaos_remainder_identity_check(2, -1, 1.0, 100, 3), Error);
}

TEST_CASE("iterated integrals on the grid") {
  const TimeGrid grid = TimeGrid::make(1.0, 64);
  const BrownianDriver d = sample_driver(grid, 1, 42, 0);
  double bt = 0.0, qv = 0.0;
  for (const Vec& inc : d.increments) {
    bt += inc[0];
    qv += inc[0] * inc[0];
  }
  CHECK(std::abs(iterated_integral(d, ChaosCoefficient::constant_first_component(grid, 1, 1)) - bt) < 1e-12);
  const double i2 = iterated_integral(d, ChaosCoefficient::constant_first_component(grid, 1, 2));
  CHECK(std::abs(i2 - (bt * bt - qv)) < 1e-12);
  CHECK(iterated_integral(d, ChaosCoefficient::constant_first_component(grid, 1, 0, 2.5)) == 2.5);

  const auto a2 = ChaosCoefficient::constant_first_component(grid, 1, 2);
  CHECK(std::abs(4.0 * simplex_norm_squared(a2, grid.dt()) - 2.0 * (1.0 - 1.0 / 64)) < 1e-12);

  // Ito sum of B against itself.
  const double ito = ito_integral(d, [](int, std::span<const Vec> past) {
    Vec b = Vec::Zero(1);
    for (const Vec& inc : past) b += inc;
    return b;
  });
  CHECK(std::abs(ito - 0.5 * (bt * bt - qv)) < 1e-12);
}

TEST_CASE("exponential martingale") {
  const TimeGrid grid = TimeGrid::make(1.0, 100);
  const BrownianDriver d = sample_driver(grid, 3, 1, 0);
  CHECK(exp_martingale(d, CameronMartinVector::zero(grid, 3)) == 1.0);
  const auto a = CameronMartinVector::from_slope(grid, [](double t) {
    Vec s(3);
    s << 1.0, t, -t;
    return s;
  });
  double ito = 0.0;
  for (int k = 0; k < grid.steps; ++k) ito += a.slopes[k].dot(d.increments[k]);
  CHECK(std::abs(exp_martingale(d, a) - std::exp(ito - 0.5 * a.norm_squared())) < 1e-12);
  bool clamped = true;
  exp_martingale(d, a, &clamped);
  CHECK_FALSE(clamped);
  // adot = dB/dt on a fine grid makes the exponent ~ 3N/2.
  const TimeGrid fine = TimeGrid::make(1.0, 2000);
  const BrownianDriver df = sample_driver(fine, 3, 2, 0);
  CameronMartinVector aligned{fine.dt(), {}};
  for (const Vec& inc : df.increments) aligned.slopes.push_back(inc / fine.dt());
  CHECK(exp_martingale(df, aligned, &clamped) == std::exp(700.0));
  CHECK(clamped);

  // On the group nothing is redundant, so conditioning is the identity.
  const auto group = geometry::make_model(geometry::ModelKind::rotation_group);
  const sde::SolutionPath p = sde::integrate(group, group->base_point(), d);
  CHECK(std::abs(conditional_exp_martingale(p, a) - exp_martingale(d, a)) < 1e-12);
}

TEST_CASE("finite-difference Malliavin derivative") {
  const TimeGrid grid = TimeGrid::make(1.0, 50);
  const BrownianDriver d = sample_driver(grid, 1, 8, 0);
  const WienerFunctional square = [](const BrownianDriver& b) {
    double s = 0.0;
    for (const Vec& inc : b.increments) s += inc[0];
    return s * s;
  };
  const auto h = CameronMartinVector::from_slope(grid, [](double t) { return Vec::Constant(1, 2.0 * t); });
  double bt = 0.0, ht = 0.0;
  for (int k = 0; k < grid.steps; ++k) {
    bt += d.increments[k][0];
    ht += h.slopes[k][0] * grid.dt();
  }
  const FdDerivative fd = malliavin_derivative_fd(square, d, h);
  CHECK(std::abs(fd.value - 2.0 * bt * ht) < 1e-8);
  CHECK(std::abs(fd.richardson - 2.0 * bt * ht) < 1e-8);
  CHECK_THROWS_AS(malliavin_derivative_fd(square, d, h, 0.0), Error);
}
