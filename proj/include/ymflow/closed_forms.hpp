#pragma once

// Explicit profile, potential and mode functions of the equivariant
// Yang-Mills heat flow in similarity variables, with analytic derivatives.

#include <functional>
#include <string>
#include <utility>

namespace ymflow {

/// Constants of the explicit self-similar profile in dimension d (5..9).
struct DimensionParams {
  int d = 5;
  double a1 = 0.0;
  double a2 = 0.0;

  static DimensionParams make(int d);
};

/// A scalar function of rho with exact first and second derivatives.
struct ClosedForm {
  std::function<double(double)> eval;
  std::function<double(double)> deriv1;
  std::function<double(double)> deriv2;
  std::string domain_note;

  double operator()(double rho) const { return eval(rho); }
};

namespace consts {
double sqrt6();
double a1();  // d = 5
double a2();  // d = 5
/// 6*sqrt(6) - 14, the shift in the SUSY-side denominators.
double c_shift();
/// alpha_0 .. alpha_3 of the second solution.
double alpha(int j);
/// 2(61 - 24 sqrt 6)/5
double h2_coeff();
/// Surface measure of the unit 6-sphere, 16 pi^3 / 15.
double sphere6();

/// Test hook: shifts a2 (every dimension) by the given amount. Used only to
/// confirm that the verify suite notices a corrupted constant.
void set_a2_offset(double offset);
}  // namespace consts

/// W(rho) = -1/(a1 rho^2 + a2).
ClosedForm weinkove_profile(const DimensionParams& params);

/// W(r / sqrt(T - t)) / (T - t). Throws DomainError for t >= T.
double blowup_solution(const DimensionParams& params, double T, double t, double r);

/// Residual of the similarity-frame steady-state equation for W in dimension d.
double self_similar_residual(const DimensionParams& params, double rho);

/// V(rho) for d = 5, and its first two derivatives.
double potential_v(double rho);
double potential_v_d1(double rho);
double potential_v_d2(double rho);

/// g(rho) = (a1 rho^2 + a2)^-2, the lambda = 1 mode.
ClosedForm symmetry_mode();

/// exp(-x^2/4) * int_0^x exp(s^2/4) ds  (= 2 * Dawson(x/2)).
double scaled_dawson(double x);

/// Second solution h of the lambda = 1 eigen-equation. Singular at 0 (h ~ rho^-5);
/// evaluation at rho <= 0 throws DomainError. Overflows past rho ~ 50.
ClosedForm second_solution();

/// rho^5 h(rho), finite at rho = 0+.
double second_solution_regular_part(double rho);

/// Residual of u'' + (6/rho - rho/2) u' + (V - 1 - lambda) u at rho, for a closed-form u.
double eigen_residual(const ClosedForm& u, double lambda, double rho);

/// q(rho) of the partner operator A = -d^2 + q.
double susy_potential(double rho);

/// beta(rho) in B = -d + beta, B+ = d + beta.
double susy_beta(double rho);
double susy_beta_d1(double rho);

/// Coefficients of the perturbation nonlinearity f1 phi^2 + f2 phi^3.
std::pair<ClosedForm, ClosedForm> nonlinearity_coeffs();

struct QMinimum {
  double rho = 0.0;
  double value = 0.0;
};

/// Global minimum of q on (0, 5/2].
QMinimum susy_potential_minimum();

}  // namespace ymflow
