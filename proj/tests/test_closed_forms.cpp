#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <cmath>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"

using namespace ymflow;
using big = boost::multiprecision::cpp_dec_float_50;

namespace {

// 50-digit reference values built from the integer/square-root expressions.
const big kS6 = boost::multiprecision::sqrt(big(6));
const big kA1 = kS6 / 4;
const big kA2 = big(15) / (18 + 7 * kS6);

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_SUITE("closed_forms") {

TEST_CASE("constants match extended precision") {
  CHECK(rel(consts::a1(), static_cast<double>(kA1)) < 2e-16);
  CHECK(rel(consts::a2(), static_cast<double>(kA2)) < 2e-16);
  CHECK(rel(consts::sphere6(), 16.0 * std::pow(M_PI, 3) / 15.0) < 1e-15);
  const DimensionParams p = DimensionParams::make(5);
  CHECK(p.a1 == consts::a1());
  CHECK(p.a2 == consts::a2());
  CHECK_THROWS_AS(DimensionParams::make(4), DomainError);
  CHECK_THROWS_AS(DimensionParams::make(10), DomainError);
}

TEST_CASE("W(0), V(0), g(0) and q(5/2) against 50-digit oracles") {
  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  const big w0 = -2 / (18 - 7 * kS6);
  CHECK(rel(W(0.0), static_cast<double>(w0)) < 1e-15);
  CHECK(std::abs(W(0.0) + 2.3430952) < 1e-7);

  const big v0 = 72 / (36 - 14 * kS6);
  CHECK(rel(potential_v(0.0), static_cast<double>(v0)) < 1e-14);
  CHECK(potential_v(0.0) == doctest::Approx(42.1759).epsilon(1e-5));

  const ClosedForm g = symmetry_mode();
  CHECK(rel(g(0.0), static_cast<double>(1 / (kA2 * kA2))) < 1e-15);
  CHECK(g(0.0) == doctest::Approx(5.4900951).epsilon(1e-7));

  const big r2 = big(25) / 4;
  const big den = r2 + 6 * kS6 - 14;
  const big q = r2 / 16 + 12 / r2 + big(3) / 4 + (384 * kS6 - r2 * (r2 + 24 * kS6 - 44) - 956) / (den * den);
  CHECK(rel(susy_potential(2.5), static_cast<double>(q)) < 1e-13);
  CHECK(susy_potential(2.5) > 1.0 / 75.0);
  CHECK(std::abs(susy_potential(2.5) - 0.0170684) < 1e-7);
}

TEST_CASE("profile residual vanishes in every dimension") {
  for (int d = 5; d <= 9; ++d) {
    const DimensionParams p = DimensionParams::make(d);
    for (double r : {0.5, 1.0, 2.0, 5.0}) CHECK(std::abs(self_similar_residual(p, r)) < 1e-10);
    for (int i = 0; i < 100; ++i) CHECK(std::abs(self_similar_residual(p, std::pow(10.0, -2.0 + 4.0 * i / 99.0))) < 1e-10);
  }
}

TEST_CASE("profile shape and asymptotics") {
  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  double prev = W(0.0);
  for (double r = 0.1; r < 50.0; r += 0.1) {
    CHECK(W(r) < 0.0);
    CHECK(W(r) > prev);
    prev = W(r);
  }
  CHECK(W(1e6) * 1e12 == doctest::Approx(-2.0 * std::sqrt(2.0 / 3.0)).epsilon(1e-9));
  // exact derivatives against central differences
  for (double r : {0.3, 1.7, 6.0}) {
    const double h = 1e-5;
    CHECK(W.deriv1(r) == doctest::Approx((W(r + h) - W(r - h)) / (2 * h)).epsilon(1e-8));
    CHECK(W.deriv2(r) == doctest::Approx((W.deriv1(r + h) - W.deriv1(r - h)) / (2 * h)).epsilon(1e-7));
  }
}

TEST_CASE("blowup solution") {
  const DimensionParams p = DimensionParams::make(5);
  const ClosedForm W = weinkove_profile(p);
  CHECK(blowup_solution(p, 1.0, 0.0, 0.0) == doctest::Approx(W(0.0)).epsilon(1e-15));
  CHECK(blowup_solution(p, 2.0, 1.0, 1.0) == doctest::Approx(W(1.0)).epsilon(1e-15));
  CHECK(blowup_solution(p, 1.0, 1.0 - 1e-9, 0.0) * 1e-9 == doctest::Approx(-1.0 / p.a2).epsilon(1e-6));
  CHECK_THROWS_AS(blowup_solution(p, 1.0, 1.0, 0.0), DomainError);
  // scaling: lambda^2 u(lambda^2 t, lambda r) is the solution with T = lambda^-2
  for (double lam : {0.5, 2.0})
    for (double t : {0.0, 0.1})
      for (double r : {0.0, 0.7, 3.0}) {
        const double a = lam * lam * blowup_solution(p, 1.0, lam * lam * t, lam * r);
        CHECK(rel(a, blowup_solution(p, 1.0 / (lam * lam), t, r)) < 1e-12);
      }
}

TEST_CASE("potential identity on [0, 100]") {
  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  for (int i = 0; i <= 2000; ++i) {
    const double r = 0.05 * i;
    const double v = potential_v(r);
    CHECK(std::abs(v + 18 * W(r) + 9 * r * r * W(r) * W(r)) < 1e-12 * std::abs(v));
  }
  CHECK(potential_v(1e5) * 1e10 == doctest::Approx(72 * (std::sqrt(6.0) - 2) / 6).epsilon(1e-8));
}

TEST_CASE("symmetry mode") {
  const ClosedForm g = symmetry_mode();
  for (double r : {0.25, 1.0, 4.0, 16.0}) CHECK(std::abs(eigen_residual(g, 1.0, r)) < 1e-10);
  for (double r : {0.0, 0.3, 2.0, 9.0}) {
    const double s = consts::a1() * r * r + consts::a2();
    CHECK(g(r) * s * s == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(g(1e4) * 1e16 == doctest::Approx(1.0 / (consts::a1() * consts::a1())).epsilon(1e-7));
}

TEST_CASE("second solution and the Wronskian") {
  const ClosedForm g = symmetry_mode(), h = second_solution();
  for (double r : {0.5, 1.0, 2.0, 4.0}) {
    const double wr = g(r) * h.deriv1(r) - g.deriv1(r) * h(r);
    CHECK(rel(wr, std::pow(r, -6) * std::exp(r * r / 4)) < 1e-8);
  }
  for (int i = 0; i <= 200; ++i) {
    const double r = 0.25 + 5.75 * i / 200.0;
    const double wr = g(r) * h.deriv1(r) - g.deriv1(r) * h(r);
    CHECK(std::abs(std::pow(r, 6) * std::exp(-r * r / 4) * wr - 1.0) < 1e-8);
  }
  for (double r : {0.5, 2.0})
    CHECK(std::abs(eigen_residual(h, 1.0, r)) < 1e-8 * std::max(std::abs(h(r)), std::abs(h.deriv2(r))));
  CHECK_THROWS_AS(h(0.0), DomainError);
  // rho^5 h has a finite nonzero limit at the origin
  const double H0 = second_solution_regular_part(1e-6);
  CHECK(std::isfinite(H0));
  CHECK(H0 != 0.0);
  CHECK(second_solution_regular_part(1e-3) == doctest::Approx(H0).epsilon(1e-4));
  CHECK(second_solution_regular_part(0.5) == doctest::Approx(std::pow(0.5, 5) * h(0.5)).epsilon(1e-12));
}

TEST_CASE("scaled Dawson function") {
  // 2 D(x/2) with D(1) = 0.5380795069127684...
  CHECK(scaled_dawson(2.0) == doctest::Approx(2 * 0.5380795069127684).epsilon(1e-13));
  CHECK(scaled_dawson(0.0) == 0.0);
  // across the switch to the asymptotic series
  CHECK(scaled_dawson(30.0) * 30.0 / 2.0 == doctest::Approx(1.0 + 2.0 / 900.0 + 12.0 / 810000.0).epsilon(1e-7));
  for (double x = 7.0; x < 9.5; x += 0.25) CHECK(scaled_dawson(x) > scaled_dawson(x + 0.25));
}

TEST_CASE("SUSY potential") {
  const QMinimum m = susy_potential_minimum();
  CHECK(m.rho > 0.0);
  CHECK(m.rho < 2.5);
  CHECK(1.0 / 6.25 + m.value > susy_potential(2.5));
  for (double r = 0.05; r < 2.5; r += 0.01) CHECK(susy_potential(r) >= m.value - 1e-12);
  double prev = susy_potential(2.5);
  for (int i = 1; i <= 1000; ++i) {
    const double q = susy_potential(2.5 + 47.5 * i / 1000.0);
    CHECK(q > prev);
    prev = q;
  }
  CHECK(susy_potential(50) > susy_potential(10));
  CHECK_THROWS_AS(susy_potential(0.0), DomainError);
  CHECK_THROWS_AS(susy_potential(-1.0), DomainError);
  for (double r : {0.4, 1.3, 5.0}) {
    const double b = susy_beta(r);
    CHECK(b == doctest::Approx(3 / r - r / 4 - 4 * r / (6 * std::sqrt(6.0) - 14 + r * r)).epsilon(1e-14));
  }
}

TEST_CASE("nonlinearity coefficients") {
  const auto [f1, f2] = nonlinearity_coeffs();
  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  CHECK(f1(0.0) == -9.0);
  CHECK(f2(2.0) == -12.0);
  for (double r : {0.0, 1.0, 10.0}) CHECK(std::abs(f1(r) + 9 * (1 + r * r * W(r))) == 0.0);
}

TEST_CASE("a2 corruption hook is visible to the identities") {
  consts::set_a2_offset(1e-6);
  const ClosedForm g = symmetry_mode(), h = second_solution();
  const double wr = g(1.0) * h.deriv1(1.0) - g.deriv1(1.0) * h(1.0);
  const double defect = std::abs(std::exp(-0.25) * wr - 1.0);
  consts::set_a2_offset(0.0);
  CHECK(defect > 1e-8);
  CHECK(rel(consts::a2(), static_cast<double>(kA2)) < 2e-16);
}

}
