#include "ymflow/closed_forms.hpp"

#include <atomic>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "ymflow/errors.hpp"

namespace ymflow {

namespace {

std::atomic<double> g_a2_offset{0.0};

// Differences of nearly equal surds are written as quotients by the
// conjugate so that no digits cancel.
const double kSqrt6 = std::sqrt(6.0);

double a1_of(int d) { return std::sqrt(static_cast<double>(d - 2)) / (2.0 * std::numbers::sqrt2); }

// (6d-12 - (d+2)sqrt(2d-4))/2 rationalised; the numerator product is
// ((6d-12)^2 - (d+2)^2 (2d-4))/2 = -(d-2)(d-4)(d-10).
double a2_of(int d) {
  const double dd = d;
  const double num = -(dd - 2.0) * (dd - 4.0) * (dd - 10.0);
  const double den = 6.0 * dd - 12.0 + (dd + 2.0) * std::sqrt(2.0 * dd - 4.0);
  return num / den + g_a2_offset.load(std::memory_order_relaxed);
}

}  // namespace

namespace consts {

double sqrt6() { return kSqrt6; }
double a1() { return kSqrt6 / 4.0; }
double a2() { return 15.0 / (18.0 + 7.0 * kSqrt6) + g_a2_offset.load(std::memory_order_relaxed); }
double c_shift() { return 20.0 / (6.0 * kSqrt6 + 14.0); }

double alpha(int j) {
  switch (j) {
    case 0: return 24.0 * (-625.0 / (8652.0 * kSqrt6 + 21193.0));
    case 1: return 4.0 * (-14375.0 / (8347.0 + 3408.0 * kSqrt6));
    case 2: return 2.0 * (-21625.0 / (372.0 * kSqrt6 + 923.0));
    case 3: return 15.0;
    default: throw DomainError("alpha index out of range: " + std::to_string(j));
  }
}

double h2_coeff() { return 2.0 * (265.0 / (61.0 + 24.0 * kSqrt6)) / 5.0; }

double sphere6() { return 16.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi / 15.0; }

void set_a2_offset(double offset) { g_a2_offset.store(offset, std::memory_order_relaxed); }

}  // namespace consts

DimensionParams DimensionParams::make(int d) {
  if (d < 5 || d > 9) throw DomainError("dimension must lie in 5..9, got " + std::to_string(d));
  DimensionParams p;
  p.d = d;
  p.a1 = a1_of(d);
  p.a2 = a2_of(d);
  return p;
}

ClosedForm weinkove_profile(const DimensionParams& params) {
  const double a1 = params.a1;
  const double a2 = params.a2;
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw DomainError("profile constants must be positive");
  ClosedForm w;
  w.eval = [=](double r) { return -1.0 / (a1 * r * r + a2); };
  w.deriv1 = [=](double r) {
    const double D = a1 * r * r + a2;
    return 2.0 * a1 * r / (D * D);
  };
  w.deriv2 = [=](double r) {
    const double D = a1 * r * r + a2;
    return 2.0 * a1 / (D * D) - 8.0 * a1 * a1 * r * r / (D * D * D);
  };
  w.domain_note = "smooth on [0, inf); W(0) = -1/a2; W ~ -1/(a1 rho^2) at infinity";
  return w;
}

double blowup_solution(const DimensionParams& params, double T, double t, double r) {
  if (!(T > 0.0)) throw DomainError("blowup time must be positive");
  if (!(t < T)) throw DomainError("t must be strictly before the blowup time");
  const double s = T - t;
  const double rho = r / std::sqrt(s);
  return -1.0 / ((params.a1 * rho * rho + params.a2) * s);
}

double self_similar_residual(const DimensionParams& params, double rho) {
  const double a1 = params.a1;
  const double a2 = params.a2;
  const double dm2 = params.d - 2.0;
  const double D = a1 * rho * rho + a2;
  const double W = -1.0 / D;
  const double Wp_over_rho = 2.0 * a1 / (D * D);
  const double Wp = rho * Wp_over_rho;
  const double Wpp = Wp_over_rho - 8.0 * a1 * a1 * rho * rho / (D * D * D);
  return Wpp + (params.d + 1.0) * Wp_over_rho - 0.5 * rho * Wp - W - 3.0 * dm2 * W * W -
         dm2 * rho * rho * W * W * W;
}

double potential_v(double rho) {
  // 36 - 14 sqrt6 = 60/(18 + 7 sqrt6)
  const double A = 60.0 / (18.0 + 7.0 * kSqrt6);
  const double r2 = rho * rho;
  const double den = A + kSqrt6 * r2;
  return 72.0 * (A + (kSqrt6 - 2.0) * r2) / (den * den);
}

double potential_v_d1(double rho) {
  const double a1 = consts::a1();
  const double D = a1 * rho * rho + consts::a2();
  const double W = -1.0 / D;
  const double Wp = 2.0 * a1 * rho / (D * D);
  return -18.0 * Wp - 18.0 * rho * W * W - 18.0 * rho * rho * W * Wp;
}

double potential_v_d2(double rho) {
  const double a1 = consts::a1();
  const double D = a1 * rho * rho + consts::a2();
  const double W = -1.0 / D;
  const double Wp = 2.0 * a1 * rho / (D * D);
  const double Wpp = 2.0 * a1 / (D * D) - 8.0 * a1 * a1 * rho * rho / (D * D * D);
  return -18.0 * Wpp - 18.0 * W * W - 72.0 * rho * W * Wp -
         18.0 * rho * rho * (Wp * Wp + W * Wpp);
}

ClosedForm symmetry_mode() {
  const double a1 = consts::a1();
  const double a2 = consts::a2();
  ClosedForm g;
  g.eval = [=](double r) {
    const double D = a1 * r * r + a2;
    return 1.0 / (D * D);
  };
  g.deriv1 = [=](double r) {
    const double D = a1 * r * r + a2;
    return -4.0 * a1 * r / (D * D * D);
  };
  g.deriv2 = [=](double r) {
    const double D = a1 * r * r + a2;
    const double D3 = D * D * D;
    return -4.0 * a1 / D3 + 24.0 * a1 * a1 * r * r / (D3 * D);
  };
  g.domain_note = "smooth and positive on [0, inf); g ~ rho^-4 / a1^2";
  return g;
}

double scaled_dawson(double x) {
  if (x < 0.0) return -scaled_dawson(-x);
  if (x == 0.0) return 0.0;
  if (x > 12.0) {
    // (2/x) sum_k (2k-1)!! (2/x^2)^k, summed until the terms stop shrinking.
    const double z = 2.0 / (x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
      const double next = term * (2.0 * k - 1.0) * z;
      if (next >= term || next < 1e-18 * sum) break;
      term = next;
      sum += term;
    }
    return 2.0 / x * sum;
  }
  const double x2 = x * x;
  auto f = [x2](double s) { return std::exp(0.25 * (s * s - x2)); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, 0.0, x, 12, 1e-14,
                                                                       &err);
}

namespace {

struct HParts {
  double h1, h1p, h1pp, h2, h2p, h2pp;
};

HParts h_parts(double r) {
  const double c = consts::c_shift();
  const double r2 = r * r;
  const double E = c + r2;
  const double a0 = consts::alpha(0), a1 = consts::alpha(1), a2 = consts::alpha(2),
               a3 = consts::alpha(3);
  const double P = a0 + r2 * (a1 + r2 * (a2 + r2 * a3));
  const double Pp = r * (2.0 * a1 + r2 * (4.0 * a2 + r2 * 6.0 * a3));
  const double Ppp = 2.0 * a1 + r2 * (12.0 * a2 + r2 * 30.0 * a3);
  const double m = 1.0 / (20.0 * std::pow(r, 5) * E * E);
  const double ell = -5.0 / r - 4.0 * r / E;
  const double ellp = 5.0 / r2 - 4.0 / E + 8.0 * r2 / (E * E);
  const double mp = m * ell;
  const double mpp = m * (ell * ell + ellp);
  const double k = consts::h2_coeff();
  HParts p{};
  p.h1 = P * m;
  p.h1p = Pp * m + P * mp;
  p.h1pp = Ppp * m + 2.0 * Pp * mp + P * mpp;
  p.h2 = k / (E * E);
  p.h2p = -4.0 * k * r / (E * E * E);
  p.h2pp = -4.0 * k / (E * E * E) + 24.0 * k * r2 / (E * E * E * E);
  return p;
}

void require_positive(double r) {
  if (!(r > 0.0)) throw DomainError("second solution is singular at rho = 0");
}

}  // namespace

ClosedForm second_solution() {
  ClosedForm h;
  h.eval = [](double r) {
    require_positive(r);
    const HParts p = h_parts(r);
    return std::exp(0.25 * r * r) * (p.h1 + p.h2 * scaled_dawson(r));
  };
  h.deriv1 = [](double r) {
    require_positive(r);
    const HParts p = h_parts(r);
    const double Dw = scaled_dawson(r);
    return std::exp(0.25 * r * r) * (0.5 * r * p.h1 + p.h1p + p.h2 + p.h2p * Dw);
  };
  h.deriv2 = [](double r) {
    require_positive(r);
    const HParts p = h_parts(r);
    const double Dw = scaled_dawson(r);
    return std::exp(0.25 * r * r) * (0.25 * r * r * p.h1 + r * p.h1p + 0.5 * p.h1 +
                                     0.5 * r * p.h2 + p.h1pp + 2.0 * p.h2p + p.h2pp * Dw);
  };
  h.domain_note = "rho > 0 only; h ~ rho^-5 at 0 and grows like exp(rho^2/4) at infinity";
  return h;
}

double second_solution_regular_part(double rho) {
  if (rho < 0.0) throw DomainError("rho must be nonnegative");
  const double c = consts::c_shift();
  const double r2 = rho * rho;
  const double E = c + r2;
  const double P =
      consts::alpha(0) + r2 * (consts::alpha(1) + r2 * (consts::alpha(2) + r2 * consts::alpha(3)));
  const double r5 = std::pow(rho, 5);
  return std::exp(0.25 * r2) * (P / (20.0 * E * E) + r5 * consts::h2_coeff() / (E * E) *
                                                         scaled_dawson(rho));
}

double eigen_residual(const ClosedForm& u, double lambda, double rho) {
  if (!(rho > 0.0)) throw DomainError("eigen residual is evaluated at rho > 0");
  return u.deriv2(rho) + (6.0 / rho - 0.5 * rho) * u.deriv1(rho) +
         (potential_v(rho) - 1.0 - lambda) * u.eval(rho);
}

double susy_potential(double rho) {
  if (!(rho > 0.0)) throw DomainError("q is defined for rho > 0");
  const double r2 = rho * rho;
  const double E = r2 + consts::c_shift();
  const double Q = (384.0 * kSqrt6 - r2 * (r2 + 24.0 * kSqrt6 - 44.0) - 956.0) / (E * E);
  return r2 / 16.0 + 12.0 / r2 + 0.75 + Q;
}

double susy_beta(double rho) {
  if (!(rho > 0.0)) throw DomainError("beta is defined for rho > 0");
  return 3.0 / rho - 0.25 * rho - 4.0 * rho / (consts::c_shift() + rho * rho);
}

double susy_beta_d1(double rho) {
  if (!(rho > 0.0)) throw DomainError("beta is defined for rho > 0");
  const double c = consts::c_shift();
  const double E = c + rho * rho;
  return -3.0 / (rho * rho) - 0.25 - 4.0 * (c - rho * rho) / (E * E);
}

std::pair<ClosedForm, ClosedForm> nonlinearity_coeffs() {
  const ClosedForm W = weinkove_profile(DimensionParams::make(5));
  ClosedForm f1;
  f1.eval = [W](double r) { return -9.0 * (1.0 + r * r * W.eval(r)); };
  f1.deriv1 = [W](double r) { return -9.0 * (2.0 * r * W.eval(r) + r * r * W.deriv1(r)); };
  f1.deriv2 = [W](double r) {
    return -9.0 * (2.0 * W.eval(r) + 4.0 * r * W.deriv1(r) + r * r * W.deriv2(r));
  };
  f1.domain_note = "bounded; f1(0) = -9";
  ClosedForm f2;
  f2.eval = [](double r) { return -3.0 * r * r; };
  f2.deriv1 = [](double r) { return -6.0 * r; };
  f2.deriv2 = [](double) { return -6.0; };
  f2.domain_note = "quadratic growth";
  return {f1, f2};
}

QMinimum susy_potential_minimum() {
  // q has a 12/rho^2 barrier at 0; a coarse scan brackets the global
  // minimum, Brent's method polishes it.
  const double hi = 2.5;
  const int n = 2000;
  double best_r = hi;
  double best_q = susy_potential(hi);
  for (int i = 1; i <= n; ++i) {
    const double r = hi * i / n;
    const double q = susy_potential(r);
    if (q < best_q) {
      best_q = q;
      best_r = r;
    }
  }
  const double step = hi / n;
  const double lo_b = std::max(best_r - step, 0.5 * step);
  const double hi_b = std::min(best_r + step, hi);
  const auto [r, q] = boost::math::tools::brent_find_minima(
      [](double x) { return susy_potential(x); }, lo_b, hi_b, 52);
  return {r, q};
}

}  // namespace ymflow
