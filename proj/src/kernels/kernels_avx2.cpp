// Compiled with -mavx2 -mfma. Nothing in this file may run unless
// avx2_supported() returned true.

#include "ymflow/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define YMFLOW_HAVE_AVX2 1
#else
#define YMFLOW_HAVE_AVX2 0
#endif

namespace ymflow::kernels {

#if YMFLOW_HAVE_AVX2
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double weighted_sum_squares_avx2(const double* w, const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    __m256d x0 = _mm256_loadu_pd(x + i);
    __m256d x1 = _mm256_loadu_pd(x + i + 4);
    a0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), x0), x0, a0);
    a1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), x1), x1, a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += w[i] * x[i] * x[i];
  return acc;
}

double weighted_dot_avx2(const double* w, const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(x + i)),
                         _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(x + i + 4)),
                         _mm256_loadu_pd(y + i + 4), a1);
  }
  double acc = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) acc += w[i] * x[i] * y[i];
  return acc;
}

void stencil5_avx2(const double* in, double* out, const double* c, double scale,
                   std::size_t begin, std::size_t end) {
  const __m256d c0 = _mm256_set1_pd(c[0] * scale);
  const __m256d c1 = _mm256_set1_pd(c[1] * scale);
  const __m256d c2 = _mm256_set1_pd(c[2] * scale);
  const __m256d c3 = _mm256_set1_pd(c[3] * scale);
  const __m256d c4 = _mm256_set1_pd(c[4] * scale);
  std::size_t i = begin;
  for (; i + 4 <= end; i += 4) {
    const double* p = in + i - 2;
    __m256d acc = _mm256_mul_pd(c0, _mm256_loadu_pd(p));
    acc = _mm256_fmadd_pd(c1, _mm256_loadu_pd(p + 1), acc);
    acc = _mm256_fmadd_pd(c2, _mm256_loadu_pd(p + 2), acc);
    acc = _mm256_fmadd_pd(c3, _mm256_loadu_pd(p + 3), acc);
    acc = _mm256_fmadd_pd(c4, _mm256_loadu_pd(p + 4), acc);
    _mm256_storeu_pd(out + i, acc);
  }
  for (; i < end; ++i) {
    const double* p = in + i - 2;
    out[i] = scale * (c[0] * p[0] + c[1] * p[1] + c[2] * p[2] + c[3] * p[3] + c[4] * p[4]);
  }
}

void cubic_poly_avx2(const double* c1, const double* c2, const double* c3, const double* x,
                     double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d xv = _mm256_loadu_pd(x + i);
    __m256d acc = _mm256_fmadd_pd(xv, _mm256_loadu_pd(c3 + i), _mm256_loadu_pd(c2 + i));
    acc = _mm256_fmadd_pd(xv, acc, _mm256_loadu_pd(c1 + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(xv, acc));
  }
  for (; i < n; ++i) out[i] = x[i] * (c1[i] + x[i] * (c2[i] + x[i] * c3[i]));
}

BarySums barycentric_avx2(const double* nodes, const double* weights, const double* f_re,
                          const double* f_im, double x, std::size_t n) {
  const __m256d xv = _mm256_set1_pd(x);
  __m256d sre = _mm256_setzero_pd();
  __m256d sim = _mm256_setzero_pd();
  __m256d sden = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    __m256d t = _mm256_div_pd(_mm256_loadu_pd(weights + j),
                              _mm256_sub_pd(xv, _mm256_loadu_pd(nodes + j)));
    sre = _mm256_fmadd_pd(t, _mm256_loadu_pd(f_re + j), sre);
    sim = _mm256_fmadd_pd(t, _mm256_loadu_pd(f_im + j), sim);
    sden = _mm256_add_pd(sden, t);
  }
  BarySums s{hsum(sre), hsum(sim), hsum(sden)};
  for (; j < n; ++j) {
    const double t = weights[j] / (x - nodes[j]);
    s.num_re += t * f_re[j];
    s.num_im += t * f_im[j];
    s.den += t;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{weighted_sum_squares_avx2, weighted_dot_avx2, stencil5_avx2,
                                 cubic_poly_avx2, barycentric_avx2};
  return table;
}

#else

const KernelTable& avx2_table() { return scalar_table(); }

#endif

}  // namespace ymflow::kernels
