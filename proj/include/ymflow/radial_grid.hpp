#pragma once

// Radial grids on [0, R] (or [a, b] away from the origin) with quadrature
// weights and differentiation operators that respect the parity of the field.

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ymflow {

enum class GridKind { Uniform, Interval, Chebyshev };
enum class Parity { Even, Odd };

std::string to_string(GridKind kind);

/// One row of a finite-difference operator: out[i] = sum_k w[k] * u[start + k].
struct StencilRow {
  std::size_t start = 0;
  std::vector<double> w;
};

/// Finite-difference weights for derivative `m` at x0 from the nodes x (Fornberg).
std::vector<double> fd_weights(double x0, std::span<const double> x, int m);

class RadialGrid;
using GridPtr = std::shared_ptr<const RadialGrid>;

class RadialGrid {
 public:
  /// Uniform nodes i*R/n, i = 0..n, trapezoid weights, order 2 or 4 stencils.
  /// Points near the origin use the even (or odd) reflection of the field.
  static GridPtr uniform(std::size_t n_intervals, double r_max, int order = 4);

  /// Uniform nodes on [a, b] with a > 0; one-sided stencils at both ends.
  static GridPtr interval(double a, double b, std::size_t n_intervals, int order = 4);

  /// Half of a degree-2n Chebyshev grid folded onto [0, R] by
  /// rho = L x / (1 - (1 - L/R) x^2). Nodes include 0 and R.
  static GridPtr chebyshev(std::size_t n, double r_max, double map_scale = 4.0);

  GridKind kind() const { return kind_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  double node(std::size_t i) const { return nodes_[i]; }
  int order() const { return order_; }
  double r_min() const { return nodes_.front(); }
  double r_max() const { return nodes_.back(); }
  bool contains_origin() const { return nodes_.front() == 0.0; }
  /// Grid spacing for uniform and interval grids; 0 for Chebyshev.
  double spacing() const { return h_; }
  double map_scale() const { return map_scale_; }
  /// Number of intervals for uniform grids, n for Chebyshev grids.
  std::size_t resolution() const { return resolution_; }

  std::vector<double> d1(std::span<const double> u, Parity p) const;
  std::vector<double> d2(std::span<const double> u, Parity p) const;
  std::vector<std::complex<double>> d1(std::span<const std::complex<double>> u, Parity p) const;
  std::vector<std::complex<double>> d2(std::span<const std::complex<double>> u, Parity p) const;

  /// Dense differentiation matrices (any kind; intended for modest sizes).
  Eigen::MatrixXd d1_matrix(Parity p) const;
  Eigen::MatrixXd d2_matrix(Parity p) const;

  /// Stencil rows of the finite-difference grids. Empty for Chebyshev.
  const std::vector<StencilRow>& d1_rows(Parity p) const;
  const std::vector<StencilRow>& d2_rows(Parity p) const;

  /// Interpolate an even field given at the nodes to an arbitrary radius.
  double interpolate(std::span<const double> values, double rho) const;
  /// Interpolant that caches whatever per-field setup interpolate() repeats.
  std::function<std::complex<double>(double)> interpolant(
      std::span<const std::complex<double>> values) const;
  std::complex<double> interpolate(std::span<const std::complex<double>> values,
                                   double rho) const;

  /// Chebyshev map helpers: x in [0, 1] <-> rho.
  double map_x_to_rho(double x) const;
  double map_rho_to_x(double rho) const;

 private:
  RadialGrid() = default;
  void build_fd_rows(bool reflect_at_origin);
  void build_chebyshev();

  template <class T>
  std::vector<T> apply_rows(const std::vector<StencilRow>& rows, std::span<const T> u) const;
  template <class T>
  T interpolate_impl(std::span<const T> values, double rho) const;

  GridKind kind_ = GridKind::Uniform;
  std::vector<double> nodes_;
  std::vector<double> weights_;
  int order_ = 4;
  double h_ = 0.0;
  double map_scale_ = 0.0;
  std::size_t resolution_ = 0;

  std::vector<StencilRow> d1_even_, d1_odd_, d2_even_, d2_odd_;
  Eigen::MatrixXd cd1_even_, cd1_odd_, cd2_even_, cd2_odd_;
  // Chebyshev: x of each node and barycentric data on the full symmetric grid.
  std::vector<double> xs_;
  std::vector<double> bary_nodes_, bary_weights_;
};

}  // namespace ymflow
