#pragma once

// Flat Wiener-space calculus on a discrete driver: Ito sums, iterated
// integrals over the strict grid simplex, the remainder identity for
// functionals with a known finite chaos expansion, exponential martingales
// and their conditioning on the solution path.

#include "pathspace/path_types.hpp"
#include "pathspace/sde.hpp"
#include "pathspace/stats.hpp"

#include <functional>
#include <span>

namespace pathspace::wiener {

/// a_k may only look at the increments before step k; adaptedness holds by
/// construction since nothing else is passed in.
using AdaptedIntegrand = std::function<Vec(int k, std::span<const Vec> past)>;

/// sum_k <a_{t_k}, dB_k>.
double ito_integral(const BrownianDriver& driver, const AdaptedIntegrand& a);
/// Same for integrand values given at the left node of every cell.
double ito_integral(const BrownianDriver& driver, const std::vector<Vec>& a);
/// Divergence of a Cameron-Martin direction, -sum_k <hdot_k, dB_k>.
double divergence(const BrownianDriver& driver, const CameronMartinVector& h);

/// alpha on the k-simplex as a sum of separable terms
/// weight * f_1(t_1) (x) ... (x) f_k(t_k), each f_j given per grid cell in R^m.
struct ChaosCoefficient {
  struct Term {
    double weight = 1.0;
    std::vector<std::vector<Vec>> factors;  // factors[j][cell]
  };
  int order = 0;
  double constant = 0.0;  // alpha_0 when order == 0
  std::vector<Term> terms;

  /// alpha == c in the first noise component, order k.
  static ChaosCoefficient constant_first_component(const TimeGrid& grid, int dim, int order, double c = 1.0);
};

/// k! sum_{i_1 < ... < i_k} <alpha(t_{i_1}, ..., t_{i_k}), dB_{i_1} (x) ... (x) dB_{i_k}>.
double iterated_integral(const BrownianDriver& driver, const ChaosCoefficient& alpha);
/// ||alpha||^2 on the strict grid simplex with measure dt^k, so that
/// E[I_k(alpha)^2] = (k!)^2 * this, exactly.
double simplex_norm_squared(const ChaosCoefficient& alpha, double dt);

/// x^p = sum_j c_j He_j(x), probabilists' Hermite polynomials.
std::vector<double> hermite_expansion(int degree);

struct ChaosIdentityReport {
  int degree = 0;
  int order = 0;
  double lhs = 0.0;          // |dR_k|^2 from the chaos coefficients
  double rhs = 0.0;          // (k+1)|a_{k+1}|^2 + |da_{k+1}|^2 by quadrature over s_1
  double residual = 0.0;     // |lhs - rhs|
  stats::EstimateWithCI lhs_mc;  // Monte Carlo T E|D R_k|^2 against rhs
};

/// For f = B_T^p (m = 1) and remainder order k.
ChaosIdentityReport chaos_remainder_identity_check(int degree, int order, double horizon, int paths,
                                                   std::uint64_t seed);

/// exp(sum <adot_k, dB_k> - |a|_H^2 / 2). The exponent is clamped at 700;
/// `clamped` reports when that happened.
double exp_martingale(const BrownianDriver& driver, const CameronMartinVector& a, bool* clamped = nullptr);

/// exp(sum <K^perp(x_k) adot_k, dB_k> - sum |K^perp(x_k) adot_k|^2 dt / 2).
double conditional_exp_martingale(const sde::SolutionPath& path, const CameronMartinVector& a);

struct ConditionalExpReport {
  double analytic = 0.0;
  stats::EstimateWithCI resampled;  // eps(a) over beta resamples vs analytic
};

ConditionalExpReport conditional_exp_martingale_check(const sde::SolutionPath& base, const CameronMartinVector& a,
                                                      int resamples, double z_max = stats::kDefaultZMax);

using WienerFunctional = std::function<double(const BrownianDriver&)>;

struct FdDerivative {
  double value = 0.0;       // step eps
  double half_step = 0.0;   // step eps/2
  double richardson = 0.0;  // (4 half_step - value)/3
};

/// (F(B + eps h) - F(B - eps h)) / 2 eps with a Richardson companion.
FdDerivative malliavin_derivative_fd(const WienerFunctional& F, const BrownianDriver& driver,
                                     const CameronMartinVector& h, double eps = 1e-4);

}  // namespace pathspace::wiener
