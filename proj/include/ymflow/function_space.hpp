#pragma once

// Radial fields, the 7-dimensional radial Laplacian and the norms of the
// energy space (the Delta and Delta^2 seminorms and their combination).

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ymflow/radial_grid.hpp"

namespace ymflow {

/// Samples of an even radial function on a grid.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;

  static RadialField sample(GridPtr grid, const std::function<double(double)>& f);
  static RadialField zeros(GridPtr grid);
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

struct ComplexField {
  GridPtr grid;
  std::vector<std::complex<double>> values;

  static ComplexField from_real(const RadialField& f);
  RadialField real() const;
  RadialField imag() const;
};

/// u', u'', u''', u'''' of an even field.
struct FieldDerivatives {
  std::vector<double> d1, d2, d3, d4;
};

FieldDerivatives derivatives(const RadialField& u);

/// u'' + 6u'/rho, with 7u''(0) at the origin.
RadialField radial_laplacian(const RadialField& u);
ComplexField radial_laplacian(const ComplexField& u);

struct NormReport {
  double value = 0.0;
  double tail_bound = 0.0;  // integrand at R_max times R_max
  bool truncated = false;   // boundary integrand above 1e-10 of the peak
};

NormReport norm1_report(const RadialField& u);
NormReport norm2_report(const RadialField& u);
double norm1(const RadialField& u);
double norm2(const RadialField& u);
double norm_H(const RadialField& u);
double norm_H(const ComplexField& u);

/// Grid quadrature of w * |u|^2, square-rooted.
double l2_norm(const RadialField& u);
double l2_norm(const ComplexField& u);
double sup_norm(const RadialField& u);

struct Seminorm {
  std::string name;  // e.g. "L2 rho^2 u'"
  bool linf = false;
  int derivative = 0;  // 0..4; 5 marks Delta u, 6 marks (Delta u)'
  double alpha = 0.0;
  double value = 0.0;
};

/// Weighted L2/Linf seminorms at the endpoint exponents of each admissible range.
std::vector<Seminorm> weighted_seminorms(const RadialField& u);

struct HardyResult {
  double lhs = 0.0;  // || rho^-alpha f ||
  double rhs = 0.0;  // || rho^(1-alpha) f' ||
  double constant = 0.0;  // 2/(2 alpha - 1)
};

/// Both sides of the Hardy inequality on [0, R]. Throws DomainError when f does
/// not vanish fast enough at the origin for the left side to be finite.
HardyResult hardy_check(const RadialField& f, int alpha);

struct TailCheck {
  double at_half = 0.0;  // rho^(3/2)|u| at R/2
  double at_end = 0.0;   // rho^(3/2)|u| at R
  bool decreasing = false;
};

TailCheck decay_tail_check(const RadialField& u);

/// Seeded corpus of smooth even fields rho^vanish * P(rho^2) * exp(-a rho^2)
/// with random cubic P and a in [0.5, 2]. Identical seeds give identical fields.
std::vector<RadialField> random_corpus(GridPtr grid, int count, unsigned long long seed, int vanish = 0);

}  // namespace ymflow
