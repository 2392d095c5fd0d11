#include "ymflow/function_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"
#include "ymflow/kernels.hpp"

namespace ymflow {

RadialField RadialField::sample(GridPtr grid, const std::function<double(double)>& f) {
  RadialField u{grid, std::vector<double>(grid->size())};
  for (std::size_t i = 0; i < grid->size(); ++i) u.values[i] = f(grid->node(i));
  return u;
}

RadialField RadialField::zeros(GridPtr grid) {
  return RadialField{grid, std::vector<double>(grid->size(), 0.0)};
}

ComplexField ComplexField::from_real(const RadialField& f) {
  ComplexField c{f.grid, std::vector<std::complex<double>>(f.values.begin(), f.values.end())};
  return c;
}

RadialField ComplexField::real() const {
  RadialField r{grid, std::vector<double>(values.size())};
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i].real();
  return r;
}

RadialField ComplexField::imag() const {
  RadialField r{grid, std::vector<double>(values.size())};
  for (std::size_t i = 0; i < values.size(); ++i) r.values[i] = values[i].imag();
  return r;
}

FieldDerivatives derivatives(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  FieldDerivatives d;
  d.d1 = g.d1(u.values, Parity::Even);
  d.d2 = g.d2(u.values, Parity::Even);
  d.d3 = g.d1(d.d2, Parity::Even);
  d.d4 = g.d2(d.d2, Parity::Even);
  return d;
}

namespace {

template <class T>
std::vector<T> laplacian_values(const RadialGrid& g, std::span<const T> u) {
  const auto du = g.d1(u, Parity::Even);
  const auto ddu = g.d2(u, Parity::Even);
  std::vector<T> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = g.node(i);
    out[i] = r == 0.0 ? 7.0 * ddu[i] : ddu[i] + 6.0 / r * du[i];
  }
  return out;
}

NormReport quadrature_norm(const RadialGrid& g, const std::vector<double>& integrand_root) {
  // integrand_root is the function whose square is integrated.
  const auto& w = g.weights();
  NormReport rep;
  const double s = kernels::active().weighted_sum_squares(w.data(), integrand_root.data(), w.size());
  rep.value = std::sqrt(std::max(s, 0.0));
  double peak = 0.0;
  for (double v : integrand_root) peak = std::max(peak, v * v);
  const double last = integrand_root.back() * integrand_root.back();
  rep.tail_bound = last * g.r_max();
  rep.truncated = peak > 0.0 && last > 1e-10 * peak;
  return rep;
}

}  // namespace

RadialField radial_laplacian(const RadialField& u) {
  return RadialField{u.grid, laplacian_values<double>(*u.grid, u.values)};
}

ComplexField radial_laplacian(const ComplexField& u) {
  return ComplexField{u.grid, laplacian_values<std::complex<double>>(*u.grid, u.values)};
}

NormReport norm1_report(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  const auto du = g.d1(u.values, Parity::Even);
  const auto ddu = g.d2(u.values, Parity::Even);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = g.node(i);
    f[i] = r * r * r * ddu[i] + 6.0 * r * r * du[i];
  }
  return quadrature_norm(g, f);
}

NormReport norm2_report(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  const FieldDerivatives d = derivatives(u);
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = g.node(i);
    f[i] = r * r * r * d.d4[i] + 12.0 * r * r * d.d3[i] + 24.0 * r * d.d2[i] - 24.0 * d.d1[i];
  }
  return quadrature_norm(g, f);
}

double norm1(const RadialField& u) { return norm1_report(u).value; }
double norm2(const RadialField& u) { return norm2_report(u).value; }

double norm_H(const RadialField& u) {
  const double n1 = norm1(u);
  const double n2 = norm2(u);
  return std::sqrt(consts::sphere6() * (n1 * n1 + n2 * n2));
}

double norm_H(const ComplexField& u) {
  const double a = norm_H(u.real());
  const double b = norm_H(u.imag());
  return std::sqrt(a * a + b * b);
}

double l2_norm(const RadialField& u) {
  const auto& w = u.grid->weights();
  return std::sqrt(kernels::active().weighted_sum_squares(w.data(), u.values.data(), w.size()));
}

double l2_norm(const ComplexField& u) {
  const double a = l2_norm(u.real());
  const double b = l2_norm(u.imag());
  return std::sqrt(a * a + b * b);
}

double sup_norm(const RadialField& u) {
  double m = 0.0;
  for (double v : u.values) m = std::max(m, std::abs(v));
  return m;
}

std::vector<Seminorm> weighted_seminorms(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  const FieldDerivatives d = derivatives(u);
  const std::vector<double> lap = laplacian_values<double>(g, u.values);
  const std::vector<double> dlap = g.d1(lap, Parity::Even);
  const std::vector<double>* by_order[] = {&u.values, &d.d1, &d.d2, &d.d3, &d.d4, &lap, &dlap};
  const char* label[] = {"u", "u'", "u''", "u'''", "u''''", "Lap u", "(Lap u)'"};

  struct Spec {
    bool linf;
    int der;
    double alpha;
  };
  const Spec specs[] = {
      {false, 0, 0.0}, {false, 0, 1.0}, {false, 1, 0.0}, {false, 1, 2.0}, {false, 2, 1.0},
      {false, 2, 3.0}, {false, 3, 2.0}, {false, 3, 3.0}, {false, 4, 3.0}, {false, 6, 3.0},
      {true, 0, 0.0},  {true, 0, 1.5},  {true, 1, 1.0},  {true, 1, 2.5},  {true, 5, 2.0},
      {true, 5, 3.0},  {true, 6, 3.0}};

  std::vector<Seminorm> out;
  std::vector<double> tmp(u.size());
  for (const Spec& s : specs) {
    const std::vector<double>& f = *by_order[s.der];
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = std::pow(g.node(i), s.alpha) * f[i];
    Seminorm sn;
    sn.linf = s.linf;
    sn.derivative = s.der;
    sn.alpha = s.alpha;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s rho^%g %s", s.linf ? "Linf" : "L2", s.alpha, label[s.der]);
    sn.name = buf;
    if (s.linf) {
      double m = 0.0;
      for (double v : tmp) m = std::max(m, std::abs(v));
      sn.value = m;
    } else {
      const auto& w = g.weights();
      sn.value = std::sqrt(kernels::active().weighted_sum_squares(w.data(), tmp.data(), w.size()));
    }
    out.push_back(std::move(sn));
  }
  return out;
}

HardyResult hardy_check(const RadialField& f, int alpha) {
  if (alpha < 1) throw DomainError("Hardy exponent must be a positive integer");
  const RadialGrid& g = *f.grid;
  HardyResult res;
  res.constant = 2.0 / (2.0 * alpha - 1.0);
  if (sup_norm(f) == 0.0) return res;
  if (!g.contains_origin()) throw DomainError("Hardy check needs a grid starting at 0");

  // Local vanishing exponent from the first two positive nodes; the left side
  // is finite and the boundary term vanishes iff 2p - 2 alpha + 1 > 0.
  const double scale = sup_norm(f);
  if (std::abs(f.values[0]) > 1e-12 * scale)
    throw DomainError("Hardy check: f(0) != 0, left side diverges");
  const double f1 = std::abs(f.values[1]), f2 = std::abs(f.values[2]);
  if (f1 > 0.0 && f2 > 0.0) {
    const double p = std::log(f2 / f1) / std::log(g.node(2) / g.node(1));
    if (2.0 * p - 2.0 * alpha + 1.0 <= 0.1)
      throw DomainError("Hardy check: f vanishes too slowly at the origin for this alpha");
  }

  const std::vector<double> df = g.d1(f.values, Parity::Even);
  std::vector<double> a(f.size()), b(f.size());
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double r = g.node(i);
    a[i] = std::pow(r, -alpha) * f.values[i];
    b[i] = std::pow(r, 1.0 - alpha) * df[i];
  }
  // Origin values by quadratic extrapolation of the squared integrands.
  auto extrap = [](const std::vector<double>& v) {
    const double s = 3.0 * v[1] * v[1] - 3.0 * v[2] * v[2] + v[3] * v[3];
    return std::sqrt(std::max(s, 0.0));
  };
  a[0] = extrap(a);
  b[0] = extrap(b);
  const auto& w = g.weights();
  res.lhs = std::sqrt(kernels::active().weighted_sum_squares(w.data(), a.data(), w.size()));
  res.rhs = std::sqrt(kernels::active().weighted_sum_squares(w.data(), b.data(), w.size()));
  return res;
}

TailCheck decay_tail_check(const RadialField& u) {
  const RadialGrid& g = *u.grid;
  const double R = g.r_max();
  TailCheck t;
  t.at_half = std::pow(0.5 * R, 1.5) * std::abs(g.interpolate(u.values, 0.5 * R));
  t.at_end = std::pow(R, 1.5) * std::abs(u.values.back());
  t.decreasing = t.at_end < t.at_half;
  return t;
}

std::vector<RadialField> random_corpus(GridPtr grid, int count, unsigned long long seed, int vanish) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), width(0.5, 2.0);
  std::vector<RadialField> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    const double c[4] = {1.0 + 0.5 * coef(rng), coef(rng), coef(rng), 0.25 * coef(rng)};
    const double a = width(rng);
    out.push_back(RadialField::sample(grid, [&](double r) {
      const double x = r * r;
      return std::pow(r, vanish) * (c[0] + x * (c[1] + x * (c[2] + x * c[3]))) * std::exp(-a * x);
    }));
  }
  return out;
}

}  // namespace ymflow
