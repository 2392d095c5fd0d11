#pragma once

// Data-parallel inner loops shared by the grid, norm and evolution code.
//
// Every kernel has a scalar reference implementation and an AVX2+FMA variant.
// The variant is chosen once at first use from the CPU feature bits; setting
// YMFLOW_FORCE_SCALAR=1 in the environment (or calling force_isa) pins the
// scalar path. The two paths agree to a few ulp for elementwise kernels and
// to reassociation error for reductions; tests/test_kernels.cpp checks this.

#include <array>
#include <cstddef>
#include <span>
#include <string_view>

namespace ymflow::kernels {

enum class Isa { Scalar, Avx2 };

Isa active_isa();
void force_isa(Isa isa);
bool avx2_supported();
std::string_view isa_name(Isa isa);

struct BarySums {
  double num_re = 0.0;
  double num_im = 0.0;
  double den = 0.0;
};

/// Table of kernel entry points for one instruction set.
struct KernelTable {
  /// sum_i w[i] * x[i]^2
  double (*weighted_sum_squares)(const double* w, const double* x, std::size_t n);
  /// sum_i w[i] * x[i] * y[i]
  double (*weighted_dot)(const double* w, const double* x, const double* y, std::size_t n);
  /// out[i] = scale * sum_k c[k] * in[i + k - 2]   for i in [begin, end)
  void (*stencil5)(const double* in, double* out, const double* c, double scale,
                   std::size_t begin, std::size_t end);
  /// out[i] = x[i] * (c1[i] + x[i] * (c2[i] + x[i] * c3[i]))
  void (*cubic_poly)(const double* c1, const double* c2, const double* c3, const double* x,
                     double* out, std::size_t n);
  /// Barycentric sums  sum_j w_j f_j / (x - x_j)  and  sum_j w_j / (x - x_j).
  /// Caller guarantees x differs from every node.
  BarySums (*barycentric)(const double* nodes, const double* weights, const double* f_re,
                          const double* f_im, double x, std::size_t n);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();
const KernelTable& active();

// Convenience wrappers over the active table.

inline double weighted_sum_squares(std::span<const double> w, std::span<const double> x) {
  return active().weighted_sum_squares(w.data(), x.data(), w.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> x,
                           std::span<const double> y) {
  return active().weighted_dot(w.data(), x.data(), y.data(), w.size());
}

inline void stencil5(std::span<const double> in, std::span<double> out,
                     const std::array<double, 5>& c, double scale, std::size_t begin,
                     std::size_t end) {
  active().stencil5(in.data(), out.data(), c.data(), scale, begin, end);
}

inline void cubic_poly(std::span<const double> c1, std::span<const double> c2,
                       std::span<const double> c3, std::span<const double> x,
                       std::span<double> out) {
  active().cubic_poly(c1.data(), c2.data(), c3.data(), x.data(), out.data(), x.size());
}

}  // namespace ymflow::kernels
