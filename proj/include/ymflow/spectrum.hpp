#pragma once

// Spectrum of the linearisation L u = Lap u - (rho/2) u' - u + V u around the
// profile: Frobenius launch, shooting, argument-principle search, Chebyshev
// collocation, the SUSY partner operator and the Riesz projection onto the
// lambda = 1 mode.

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ymflow/function_space.hpp"
#include "ymflow/ode.hpp"

namespace ymflow {

using cplx = std::complex<double>;

/// Even Taylor coefficients V_k of V(rho) = sum V_k rho^(2k).
std::vector<double> potential_taylor(int order);

/// Coefficients c_k of the analytic solution u = sum c_k rho^(2k), c_0 = 1.
std::vector<cplx> frobenius_coefficients(cplx lambda, int order);

struct FrobeniusLaunch {
  double rho0 = 0.0;  // radius actually used (may be reduced)
  cplx u;
  cplx du;
  double tail = 0.0;  // size of the last retained term relative to the sum
};

/// Analytic branch (u(0) = 1) and its derivative at rho0. The radius is halved
/// until the ratio test on the last two terms passes; DomainError below 1e-4.
FrobeniusLaunch frobenius_launch(cplx lambda, double rho0, int order);

/// (u, u') at R of the branch u ~ rho^-s (1 + a rho^-2), s = 2(lambda + 1),
/// that decays algebraically at infinity; the common factor R^-s is dropped.
std::pair<cplx, cplx> recessive_start(cplx lambda, double R);

struct ShootOptions {
  double rho0 = 0.25;
  int order = 24;
  OdeOptions ode{};
};

/// Coefficient of the exp(rho^2/4) rho^(2 lambda - 5) branch at R = grid.r_max()
/// for the solution that is analytic at 0 with u(0) = 1. Zero exactly at eigenvalues.
cplx shoot_matching(cplx lambda, const RadialGrid& grid, const ShootOptions& opt = {});
cplx shoot_matching(cplx lambda, double r_max, const ShootOptions& opt = {});

/// Eigenfunction for an (approximate) eigenvalue: outward solution up to a
/// matching radius, inward recessive solution beyond it. Normalised u(0) = 1.
struct AssembledMode {
  ComplexField u;
  double match_radius = 0.0;
  double derivative_mismatch = 0.0;  // relative jump of u' at the matching radius
};
AssembledMode assemble_eigenfunction(cplx lambda, GridPtr grid, const ShootOptions& opt = {});

struct Window {
  double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;
  bool degenerate() const { return !(re_max > re_min) || !(im_max > im_min); }
};

struct Eigenpair {
  cplx lambda;
  double residual = 0.0;
  std::string method;
  std::optional<ComplexField> eigenfunction;
};

struct SpectralResult {
  std::string method;
  Window window{};
  std::vector<Eigenpair> eigenvalues;
  std::vector<std::string> notes;
  GridPtr grid;
};

struct SearchOptions {
  int boundary_points = 256;
  int max_depth = 4;
  double root_tol = 1e-12;
  double residual_tol = 1e-6;
  ShootOptions shoot{};
};

/// Zeros of shoot_matching inside the window via argument-principle counting
/// plus secant refinement; each root is checked on its assembled eigenfunction.
SpectralResult find_eigenvalues(const Window& window, GridPtr grid, const SearchOptions& opt = {});

/// Winding number of shoot_matching around the window boundary.
int count_zeros(const Window& window, double r_max, const SearchOptions& opt = {});

enum class FarField { Dirichlet, Robin };

/// Dense collocation of L on a Chebyshev grid, all nodes, no boundary condition.
Eigen::MatrixXd collocation_operator(const RadialGrid& grid);

/// Collocation operator restricted to the nodes with rho < R (u(R) = 0).
Eigen::MatrixXd collocation_operator_dirichlet(const RadialGrid& grid);

/// Eigenvalues with Re lambda > cutoff, sorted by decreasing real part, at most
/// n_modes of them. The eigenvector of the leading one is attached.
SpectralResult collocation_spectrum(GridPtr grid, int n_modes,
                                    FarField closure = FarField::Dirichlet,
                                    double cutoff = -0.5);

/// v = rho^3 exp(-rho^2/8) u and its inverse (origin value by extrapolation in rho^2).
RadialField susy_transform(const RadialField& u);
RadialField susy_inverse(const RadialField& v);

/// Bv = -v' + beta v and B+v = v' + beta v on a grid that excludes rho = 0.
std::pair<RadialField, RadialField> factorization_ops(const RadialField& v);

/// Residual of the normal-form eigen-equation  lambda v - v'' + (rho^2/16 + 6/rho^2 - 3/4 - V) v.
RadialField normal_form_residual(const RadialField& v, double lambda);

struct SusyBound {
  double rayleigh_min = 0.0;           // smallest eigenvalue of the discretised A
  std::vector<double> lowest;          // a few of the lowest eigenvalues
  double symmetry_defect = 0.0;
  Eigen::VectorXd ground_state;        // on the grid nodes
};

/// A = -d^2 + q on an interval grid with Dirichlet conditions one spacing
/// outside each end. Throws AccuracyError on an asymmetric assembly.
SusyBound susy_ground_bound(GridPtr interval_grid, int n_lowest = 4);

/// The symmetric matrix of A used by susy_ground_bound.
Eigen::MatrixXd susy_matrix(const RadialGrid& interval_grid);

struct SpectralProjection {
  Eigen::MatrixXcd P;  // acts on the nodes rho < R
  int rank = 0;
  double radius = 0.5;
  double idempotency_defect = 0.0;
  std::vector<double> singular_values;
  GridPtr grid;

  /// Coefficient c with P f = c g (least squares against the sampled mode).
  double g_coefficient(std::span<const double> f_on_grid) const;
  Eigen::VectorXd g_samples;
};

/// Riesz projection (1/2 pi i) \oint (lambda - L)^-1 on |lambda - 1| = radius,
/// trapezoid rule with `points` nodes.
SpectralProjection spectral_projection(GridPtr grid, int points = 64, double radius = 0.5);

}  // namespace ymflow
