#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ymflow/kernels.hpp"

using namespace ymflow::kernels;

namespace {

std::vector<double> randoms(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Sizes straddle the 4-wide vector length and the unrolled loop bodies.
constexpr std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 33, 64, 255, 1001, 4097};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatch reports a consistent instruction set") {
  const Isa isa = active_isa();
  CHECK((isa == Isa::Scalar || isa == Isa::Avx2));
  if (isa == Isa::Avx2) CHECK(avx2_supported());
  CHECK(isa_name(Isa::Scalar) == "scalar");
  if (const char* e = std::getenv("YMFLOW_FORCE_SCALAR"); e && std::string(e) == "1") CHECK(isa == Isa::Scalar);
}

TEST_CASE("reductions agree between scalar and avx2") {
  if (!avx2_supported()) return;
  std::mt19937_64 rng(7);
  const KernelTable& s = scalar_table();
  const KernelTable& v = avx2_table();
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto w = randoms(n, rng, 0.0, 1.0), x = randoms(n, rng), y = randoms(n, rng);
    double mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) mag += std::abs(w[i] * x[i] * y[i]) + w[i] * x[i] * x[i];
    const double tol = 1e-15 * (mag + 1.0) * std::sqrt(double(n) + 1.0);
    CHECK(std::abs(s.weighted_sum_squares(w.data(), x.data(), n) - v.weighted_sum_squares(w.data(), x.data(), n)) <= tol);
    CHECK(std::abs(s.weighted_dot(w.data(), x.data(), y.data(), n) - v.weighted_dot(w.data(), x.data(), y.data(), n)) <= tol);
  }
}

TEST_CASE("elementwise kernels agree between scalar and avx2") {
  if (!avx2_supported()) return;
  std::mt19937_64 rng(11);
  const KernelTable& s = scalar_table();
  const KernelTable& v = avx2_table();
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto c1 = randoms(n, rng), c2 = randoms(n, rng), c3 = randoms(n, rng), x = randoms(n, rng, -3, 3);
    std::vector<double> a(n), b(n);
    s.cubic_poly(c1.data(), c2.data(), c3.data(), x.data(), a.data(), n);
    v.cubic_poly(c1.data(), c2.data(), c3.data(), x.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14).scale(1.0));

    if (n < 5) continue;
    const auto in = randoms(n, rng);
    const double c[5] = {1.0 / 12, -2.0 / 3, 0.0, 2.0 / 3, -1.0 / 12};
    std::vector<double> p(n, 0.0), q(n, 0.0);
    s.stencil5(in.data(), p.data(), c, 3.5, 2, n - 2);
    v.stencil5(in.data(), q.data(), c, 3.5, 2, n - 2);
    for (std::size_t i = 0; i < n; ++i) CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-14).scale(1.0));
  }
}

TEST_CASE("barycentric sums agree between scalar and avx2") {
  if (!avx2_supported()) return;
  std::mt19937_64 rng(3);
  for (std::size_t n : {5u, 8u, 9u, 130u, 513u}) {
    std::vector<double> nodes(n), wts(n);
    for (std::size_t j = 0; j < n; ++j) {
      nodes[j] = std::cos(M_PI * double(j) / double(n - 1));
      wts[j] = (j % 2 ? -1.0 : 1.0) * (j == 0 || j == n - 1 ? 0.5 : 1.0);
    }
    const auto fr = randoms(n, rng), fi = randoms(n, rng);
    for (double x : {0.123, -0.77, 0.999}) {
      const BarySums a = scalar_table().barycentric(nodes.data(), wts.data(), fr.data(), fi.data(), x, n);
      const BarySums b = avx2_table().barycentric(nodes.data(), wts.data(), fr.data(), fi.data(), x, n);
      CHECK(a.num_re / a.den == doctest::Approx(b.num_re / b.den).epsilon(1e-11));
      CHECK(a.num_im / a.den == doctest::Approx(b.num_im / b.den).epsilon(1e-11));
    }
  }
}

TEST_CASE("scalar kernels against direct loops") {
  const KernelTable& s = scalar_table();
  std::vector<double> w{1, 2, 3}, x{1, -1, 2};
  CHECK(s.weighted_sum_squares(w.data(), x.data(), 3) == 1 + 2 + 12);
  std::vector<double> c1{1, 0, 0}, c2{0, 1, 0}, c3{0, 0, 1}, out(3);
  s.cubic_poly(c1.data(), c2.data(), c3.data(), x.data(), out.data(), 3);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 1.0);
  CHECK(out[2] == 8.0);
}

TEST_CASE("force_isa pins the scalar path") {
  const Isa before = active_isa();
  force_isa(Isa::Scalar);
  CHECK(active_isa() == Isa::Scalar);
  std::vector<double> w{1, 1}, x{3, 4};
  CHECK(weighted_sum_squares(w, x) == 25.0);
  force_isa(before);
}

}
