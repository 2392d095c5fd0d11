#include "ymflow/kernels.hpp"

namespace ymflow::kernels {
namespace {

double weighted_sum_squares_scalar(const double* w, const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * x[i];
  return acc;
}

double weighted_dot_scalar(const double* w, const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

void stencil5_scalar(const double* in, double* out, const double* c, double scale,
                     std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    const double* p = in + i - 2;
    out[i] = scale * (c[0] * p[0] + c[1] * p[1] + c[2] * p[2] + c[3] * p[3] + c[4] * p[4]);
  }
}

void cubic_poly_scalar(const double* c1, const double* c2, const double* c3, const double* x,
                       double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * (c1[i] + x[i] * (c2[i] + x[i] * c3[i]));
}

BarySums barycentric_scalar(const double* nodes, const double* weights, const double* f_re,
                            const double* f_im, double x, std::size_t n) {
  BarySums s;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = weights[j] / (x - nodes[j]);
    s.num_re += t * f_re[j];
    s.num_im += t * f_im[j];
    s.den += t;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{weighted_sum_squares_scalar, weighted_dot_scalar,
                                 stencil5_scalar, cubic_poly_scalar, barycentric_scalar};
  return table;
}

}  // namespace ymflow::kernels
