#pragma once

// Green's-function application of (lambda - L)^-1 built from the two recessive
// solutions, the Liouville-Green phase of the rescaled equation, and the
// vertical-line bound scan.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "ymflow/function_space.hpp"
#include "ymflow/spectrum.hpp"

namespace ymflow {

struct ResolventQuery {
  double alpha = 0.0;  // Re lambda
  double omega = 0.0;  // Im lambda

  cplx lambda() const { return {alpha, omega}; }
  cplx mu() const { return 4.0 * lambda() - 3.0; }
  double b() const { return 4.0 * alpha - 3.0; }
  double omega_tilde() const { return 4.0 * omega; }
};

/// F(z) = log(z + sqrt(1+z^2))/2 + z sqrt(1+z^2)/2, principal branches.
cplx lg_F(cplx z);

/// mu * xi(r, mu) with xi = F(mu^-1/2 r) - F(10 mu^-1/2). r is the rescaled
/// radius (rho = 2r). Throws DomainError for r < 3 or |mu| < 1.
cplx lg_phase(double r, const ResolventQuery& q);

/// Q(r, mu) = q(mu^-1/2 r)/mu, q(y) = (2 - 3y^2)/(4(1+y^2)^2).
cplx lg_potential(double r, const ResolventQuery& q);

/// WKB amplitude |(1 + r^2/mu)^-1/4 exp(-mu xi)| of the decaying normal-form solution.
double wkb_amplitude(double r, const ResolventQuery& q);

struct FundamentalPair {
  ResolventQuery query;
  GridPtr grid;
  /// exp(-rho^2/4) u0 for the solution regular at 0 (u0(0) = 1), and its derivative.
  ComplexField v_origin, v_origin_d;
  /// u_inf, recessive at infinity, and its derivative.
  ComplexField v_infinity, v_infinity_d;
  /// rho^6 [v0 u_inf' - (v0' + rho v0/2) u_inf]; constant in rho.
  cplx wronskian;
  std::array<double, 3> check_radii{};
  std::array<cplx, 3> wronskian_samples{};
  double wronskian_spread = 0.0;  // max relative deviation of the samples
  /// Per node: log of the renormalisation already folded into the stored
  /// values (outward plus inward). Diagnostic only.
  std::vector<double> scale_logs;
};

struct ResolventOptions {
  ShootOptions shoot{};
  double residual_tol = 1e-6;
  bool check_residual = true;
};

/// Throws SingularityError when lambda is an eigenvalue to working accuracy.
FundamentalPair fundamental_pair(const ResolventQuery& q, GridPtr grid,
                                 const ResolventOptions& opt = {});

struct ResolventSolution {
  ComplexField w;
  double residual = 0.0;  // ||(lambda - L)w - f|| / ||f|| on the grid
};

/// w = (lambda - L)^-1 f. Throws AccuracyError if the residual check fails.
ResolventSolution apply_resolvent(const ResolventQuery& q, const ComplexField& f,
                                  const ResolventOptions& opt = {});
ResolventSolution apply_resolvent(const ResolventQuery& q, const RadialField& f,
                                  const ResolventOptions& opt = {});

/// (lambda - L) w on the grid, using the grid's derivative operators.
ComplexField apply_shifted_operator(const ResolventQuery& q, const ComplexField& w);

/// Even Gaussian bumps at 4 centres x 2 widths, each normalised to norm_H = 1.
std::vector<RadialField> default_probes(GridPtr grid);

struct ScanRow {
  double alpha = 0.0;
  double omega = 0.0;
  int probe_id = 0;
  double ratio = 0.0;
  double residual = 0.0;
  std::string status = "ok";
};

struct ScanSummary {
  std::vector<ScanRow> rows;
  std::vector<double> omegas;
  std::vector<double> max_ratio;  // per omega, over probes with status ok
  double slope = 0.0;             // least squares d log(max_ratio) / d log|omega|
  double max_residual = 0.0;
};

ScanSummary resolvent_bound_scan(double alpha, const std::vector<double>& omegas,
                                 const std::vector<RadialField>& probes,
                                 const ResolventOptions& opt = {});

}  // namespace ymflow
