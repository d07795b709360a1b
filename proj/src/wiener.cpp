#include "pathspace/wiener.hpp"

#include "pathspace/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace pathspace::wiener {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void require_grid(const BrownianDriver& driver, std::size_t cells, const char* what) {
  if (static_cast<int>(cells) != driver.grid.steps)
    fail(ErrorCode::invalid_argument, std::string(what) + " does not match the driver grid");
}

double hermite(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (int j = 1; j < n; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Gauss-Legendre nodes and weights on [0, T] (Golub-Welsch).
void gauss_legendre(int n, double horizon, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = jacobi(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = 0.5 * horizon * (eig.eigenvalues()[i] + 1.0);
    const double v0 = eig.eigenvectors()(0, i);
    weights[i] = horizon * v0 * v0;
  }
}

}  // namespace

double ito_integral(const BrownianDriver& driver, const AdaptedIntegrand& a) {
  double s = 0.0;
  const std::span<const Vec> all(driver.increments);
  for (int k = 0; k < driver.grid.steps; ++k) s += a(k, all.first(k)).dot(driver.increments[k]);
  return s;
}

double ito_integral(const BrownianDriver& driver, const std::vector<Vec>& a) {
  require_grid(driver, a.size(), "integrand");
  double s = 0.0;
  for (int k = 0; k < driver.grid.steps; ++k) s += a[k].dot(driver.increments[k]);
  return s;
}

double divergence(const BrownianDriver& driver, const CameronMartinVector& h) {
  return -ito_integral(driver, h.slopes);
}

ChaosCoefficient ChaosCoefficient::constant_first_component(const TimeGrid& grid, int dim, int order, double c) {
  ChaosCoefficient alpha;
  alpha.order = order;
  if (order == 0) {
    alpha.constant = c;
    return alpha;
  }
  const Vec e = Vec::Unit(dim, 0);
  alpha.terms.push_back({c, std::vector<std::vector<Vec>>(order, std::vector<Vec>(grid.steps, e))});
  return alpha;
}

double iterated_integral(const BrownianDriver& driver, const ChaosCoefficient& alpha) {
  if (alpha.order == 0) return alpha.constant;
  const int n = driver.grid.steps;
  double total = 0.0;
  std::vector<double> lower(n), upper(n);
  for (const auto& term : alpha.terms) {
    if (static_cast<int>(term.factors.size()) != alpha.order)
      fail(ErrorCode::invalid_argument, "chaos term has the wrong number of factors");
    // lower[i] = sum over strictly increasing index chains ending at or before i.
    std::fill(lower.begin(), lower.end(), 1.0);
    for (int l = 0; l < alpha.order; ++l) {
      require_grid(driver, term.factors[l].size(), "chaos factor");
      double run = 0.0;
      for (int i = 0; i < n; ++i) {
        const double below = l == 0 ? 1.0 : (i > 0 ? lower[i - 1] : 0.0);
        run += below * term.factors[l][i].dot(driver.increments[i]);
        upper[i] = run;
      }
      std::swap(lower, upper);
    }
    total += term.weight * lower[n - 1];
  }
  return factorial(alpha.order) * total;
}

double simplex_norm_squared(const ChaosCoefficient& alpha, double dt) {
  if (alpha.order == 0) return alpha.constant * alpha.constant;
  double total = 0.0;
  for (const auto& r : alpha.terms) {
    for (const auto& s : alpha.terms) {
      const int n = static_cast<int>(r.factors[0].size());
      std::vector<double> lower(n, 1.0), upper(n);
      for (int l = 0; l < alpha.order; ++l) {
        double run = 0.0;
        for (int i = 0; i < n; ++i) {
          const double below = l == 0 ? 1.0 : (i > 0 ? lower[i - 1] : 0.0);
          run += below * r.factors[l][i].dot(s.factors[l][i]) * dt;
          upper[i] = run;
        }
        std::swap(lower, upper);
      }
      total += r.weight * s.weight * lower[n - 1];
    }
  }
  return total;
}

std::vector<double> hermite_expansion(int degree) {
  std::vector<double> c(degree + 1, 0.0);
  for (int j = degree; j >= 0; j -= 2) {
    const int pairs = (degree - j) / 2;
    c[j] = factorial(degree) / (factorial(j) * std::pow(2.0, pairs) * factorial(pairs));
  }
  return c;
}

ChaosIdentityReport chaos_remainder_identity_check(int degree, int order, double horizon, int paths,
                                                   std::uint64_t seed) {
  if (degree < 0 || order < 0) fail(ErrorCode::invalid_argument, "degree and order must be non-negative");
  if (!(horizon > 0.0) || paths < 2) fail(ErrorCode::invalid_argument, "need T > 0 and at least 2 paths");
  const std::vector<double> c = hermite_expansion(degree);
  const int p = degree, k = order;
  ChaosIdentityReport rep;
  rep.degree = p;
  rep.order = k;

  // Left side: R_k = T^{p/2} sum_{j>k} c_j He_j(Z) has D_s R_k = T^{(p-1)/2}
  // sum_{j>k} c_j j He_{j-1}(Z) for every s, and E He_i^2 = i!.
  for (int j = k + 1; j <= p; ++j) rep.lhs += c[j] * c[j] * j * factorial(j);
  rep.lhs *= std::pow(horizon, p);

  // Right side: a_{k+1}(s) = sum_{j>k} c_j T^{(p-j)/2} j!/q! I_q(1)_{s_1} with
  // q = j-k-1, so (k+1)E|a|^2 + E|Da|^2 at s_1 is
  // sum_j coef_j^2 q! (k+1+q) s_1^q, integrated over the simplex.
  std::vector<double> nodes, weights;
  gauss_legendre(std::max(2, p + k + 2), horizon, nodes, weights);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double s = nodes[i];
    double integrand = 0.0;
    for (int j = k + 1; j <= p; ++j) {
      const int q = j - k - 1;
      const double coef = c[j] * std::pow(horizon, 0.5 * (p - j)) * factorial(j) / factorial(q);
      integrand += coef * coef * factorial(q) * (k + 1 + q) * std::pow(s, q);
    }
    rep.rhs += weights[i] * integrand * std::pow(horizon - s, k) / factorial(k);
  }
  rep.residual = std::abs(rep.lhs - rep.rhs);

  std::vector<double> samples(paths);
  for (int i = 0; i < paths; ++i) {
    double z = 0.0;
    rng::standard_normals({seed, static_cast<std::uint64_t>(i)}, 0, rng::channel::driver, {&z, 1});
    double d = 0.0;
    for (int j = k + 1; j <= p; ++j) d += c[j] * j * hermite(j - 1, z);
    d *= std::pow(horizon, 0.5 * (p - 1));
    samples[i] = horizon * d * d;
  }
  rep.lhs_mc = stats::estimate(samples, rep.rhs, 3.0, seed);
  return rep;
}

double exp_martingale(const BrownianDriver& driver, const CameronMartinVector& a, bool* clamped) {
  require_grid(driver, a.slopes.size(), "exponent direction");
  double expo = ito_integral(driver, a.slopes) - 0.5 * a.norm_squared();
  const bool clip = expo > 700.0;
  if (clamped) *clamped = clip;
  if (clip) expo = 700.0;
  return std::exp(expo);
}

double conditional_exp_martingale(const sde::SolutionPath& path, const CameronMartinVector& a) {
  require_grid(path.driver, a.slopes.size(), "exponent direction");
  double ito = 0.0, energy = 0.0;
  for (int k = 0; k < path.steps(); ++k) {
    const Vec rel = path.model->relevant_projection(path.points[k]) * a.slopes[k];
    ito += rel.dot(path.driver.increments[k]);
    energy += rel.squaredNorm();
  }
  return std::exp(std::min(700.0, ito - 0.5 * energy * a.dt));
}

ConditionalExpReport conditional_exp_martingale_check(const sde::SolutionPath& base, const CameronMartinVector& a,
                                                      int resamples, double z_max) {
  if (resamples < 2) fail(ErrorCode::invalid_argument, "need at least two resamples");
  const sde::NoiseSplit split = sde::decompose_noise(base);
  ConditionalExpReport rep;
  rep.analytic = conditional_exp_martingale(base, a);
  std::vector<double> samples(resamples);
  for (int i = 0; i < resamples; ++i) {
    const sde::Resampled r = sde::reconstruct_driver(base, split, sde::fresh_redundant(base, i));
    samples[i] = exp_martingale(r.path.driver, a);
  }
  rep.resampled = stats::estimate(samples, rep.analytic, z_max, base.driver.seed);
  return rep;
}

FdDerivative malliavin_derivative_fd(const WienerFunctional& F, const BrownianDriver& driver,
                                     const CameronMartinVector& h, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "finite-difference step must be positive");
  auto central = [&](double e) {
    const double up = F(shifted(driver, h, e)), down = F(shifted(driver, h, -e));
    if (!std::isfinite(up) || !std::isfinite(down))
      fail(ErrorCode::numerical_failure, "functional is not finite near the driver");
    return (up - down) / (2.0 * e);
  };
  FdDerivative d;
  d.value = central(eps);
  d.half_step = central(0.5 * eps);
  d.richardson = (4.0 * d.half_step - d.value) / 3.0;
  return d;
}

}  // namespace pathspace::wiener
