#include "ymflow/resolvent.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"

namespace ymflow {

cplx lg_F(cplx z) {
  const cplx s = std::sqrt(1.0 + z * z);
  return 0.5 * std::log(z + s) + 0.5 * z * s;
}

cplx lg_phase(double r, const ResolventQuery& q) {
  if (r < 3.0) throw DomainError("Liouville-Green phase is defined for r >= 3");
  const cplx mu = q.mu();
  if (std::abs(mu) < 1.0) throw DomainError("Liouville-Green phase needs |mu| >= 1");
  if (std::abs(std::arg(mu)) > std::numbers::pi - 1e-6)
    throw DomainError("mu sits on the branch cut of the square root");
  const cplx s = 1.0 / std::sqrt(mu);
  return mu * (lg_F(s * r) - lg_F(s * 10.0));
}

cplx lg_potential(double r, const ResolventQuery& q) {
  const cplx mu = q.mu();
  const cplx y = r / std::sqrt(mu);
  const cplx y2 = y * y;
  const cplx qy = (2.0 - 3.0 * y2) / (4.0 * (1.0 + y2) * (1.0 + y2));
  return qy / mu;
}

double wkb_amplitude(double r, const ResolventQuery& q) {
  const cplx mu = q.mu();
  return std::abs(std::pow(1.0 + r * r / mu, -0.25) * std::exp(-lg_phase(r, q)));
}

namespace {

// Log-derivative du/drho at R of the solution recessive at infinity. For
// |omega| >= 1 it comes from the WKB form of the rescaled equation (r = rho/2),
// otherwise from the algebraic expansion.
cplx far_log_derivative(const ResolventQuery& q, double R) {
  if (std::abs(q.omega) >= 1.0) {
    const double r = 0.5 * R;
    const cplx mu = q.mu();
    const cplx root = std::sqrt(mu) * std::sqrt(1.0 + r * r / mu);
    const cplx dr = -3.0 / r + r - r / (2.0 * (mu + r * r)) - root;
    return 0.5 * dr;
  }
  const auto [u, du] = recessive_start(q.lambda(), R);
  return du / u;
}

struct PairData {
  std::vector<cplx> v0, v0d, J0, ui, uid, Jinf;
  std::vector<double> logs;
  std::array<double, 3> radii{};
  std::array<cplx, 3> wr{};
  std::array<double, 3> wr_scale{};
};

template <class FieldFn>
PairData integrate_pair(const ResolventQuery& q, const RadialGrid& g, FieldFn&& f,
                        const ResolventOptions& opt) {
  const cplx lambda = q.lambda();
  const std::vector<double>& x = g.nodes();
  const std::size_t n = x.size();
  const double R = g.r_max();
  PairData out;
  out.v0.assign(n, 0.0);
  out.v0d.assign(n, 0.0);
  out.J0.assign(n, 0.0);
  out.ui.assign(n, 0.0);
  out.uid.assign(n, 0.0);
  out.Jinf.assign(n, 0.0);
  out.logs.assign(n, 0.0);
  out.radii = R >= 24.0 ? std::array<double, 3>{2.0, 6.0, 12.0}
                        : std::array<double, 3>{R / 12.0, R / 4.0, R / 2.0};

  const FrobeniusLaunch fl = frobenius_launch(lambda, opt.shoot.rho0, opt.shoot.order);
  const double r0 = fl.rho0;
  // Keep the homogeneous part O(1) so the absolute tolerance is meaningful for
  // the integral components, which start from exactly zero.
  OdeOptions ode = opt.shoot.ode;
  ode.renorm_threshold = 1e3;
  ode.renorm_floor = 1e-3;
  ode.renorm_components = 2;

  // Regular solution near the origin from the series.
  auto series_scaled = [&](double r) -> std::pair<cplx, cplx> {
    if (r == 0.0) return {1.0, 0.0};
    const FrobeniusLaunch s = frobenius_launch(lambda, r, opt.shoot.order);
    const double e = std::exp(-0.25 * r * r);
    return {e * s.u, e * (s.du - 0.5 * r * s.u)};
  };
  auto J0_series = [&](double r) -> cplx {
    if (r == 0.0) return 0.0;
    using GL = boost::math::quadrature::gauss<double, 15>;
    const double re = GL::integrate(
        [&](double s) { return (series_scaled(s).first * std::pow(s, 6) * f(s)).real(); }, 0.0, r);
    const double im = GL::integrate(
        [&](double s) { return (series_scaled(s).first * std::pow(s, 6) * f(s)).imag(); }, 0.0, r);
    return {re, im};
  };

  // Stops: grid nodes beyond the launch radius plus the Wronskian radii.
  std::vector<double> fwd;
  for (double r : x)
    if (r > r0) fwd.push_back(r);
  for (double r : out.radii)
    if (r > r0) fwd.push_back(r);
  std::sort(fwd.begin(), fwd.end());
  fwd.erase(std::unique(fwd.begin(), fwd.end()), fwd.end());

  auto fwd_rhs = [&](const CState<3>& y, CState<3>& dy, double r) {
    dy[0] = y[1];
    dy[1] = -(0.5 * r + 6.0 / r) * y[1] - (2.5 + potential_v(r) - lambda) * y[0];
    dy[2] = y[0] * std::pow(r, 6) * f(r);
  };
  const auto [v0_r0, v0d_r0] = series_scaled(r0);
  CState<3> y0{v0_r0, v0d_r0, J0_series(r0)};
  const auto fw = integrate_stops<3>(fwd_rhs, y0, r0, fwd.back(), fwd, ode);

  // Inward recessive solution from R down to the first positive node.
  const double r_in = x[0] > 0.0 ? x[0] : x[1];
  std::vector<double> bwd;
  for (double r : x)
    if (r >= r_in && r < R) bwd.push_back(r);
  for (double r : out.radii) bwd.push_back(r);
  std::sort(bwd.begin(), bwd.end(), std::greater<>());
  bwd.erase(std::unique(bwd.begin(), bwd.end()), bwd.end());

  auto bwd_rhs = [&](const CState<3>& y, CState<3>& dy, double r) {
    dy[0] = y[1];
    dy[1] = -(6.0 / r - 0.5 * r) * y[1] - (potential_v(r) - 1.0 - lambda) * y[0];
    dy[2] = 0.5 * r * y[2] - y[0] * std::pow(r, 6) * f(r);
  };
  CState<3> yR{1.0, far_log_derivative(q, R), 0.0};
  const auto bw = integrate_stops<3>(bwd_rhs, yR, R, r_in, bwd, ode);

  auto fwd_at = [&](double r, cplx& v, cplx& vd, cplx& J, double& lg) {
    if (r <= r0) {
      std::tie(v, vd) = series_scaled(r);
      J = J0_series(r);
      lg = 0.0;
      return;
    }
    const auto it = std::lower_bound(fw.t.begin(), fw.t.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - fw.t.begin());
    v = fw.y[k][0];
    vd = fw.y[k][1];
    J = fw.y[k][2];
    lg = fw.log_scale[k];
  };
  auto bwd_at = [&](double r, cplx& u, cplx& ud, cplx& J, double& lg) {
    if (r >= R) {
      u = yR[0];
      ud = yR[1];
      J = 0.0;
      lg = 0.0;
      return;
    }
    const auto it = std::lower_bound(bw.t.begin(), bw.t.end(), r, std::greater<>());
    const std::size_t k = static_cast<std::size_t>(it - bw.t.begin());
    u = bw.y[k][0];
    ud = bw.y[k][1];
    J = bw.y[k][2];
    lg = bw.log_scale[k];
  };

  for (std::size_t i = 0; i < n; ++i) {
    double lf = 0.0, lb = 0.0;
    fwd_at(x[i], out.v0[i], out.v0d[i], out.J0[i], lf);
    if (x[i] > 0.0) bwd_at(x[i], out.ui[i], out.uid[i], out.Jinf[i], lb);
    const double ef = std::exp(lf), eb = std::exp(lb);
    out.v0[i] *= ef;
    out.v0d[i] *= ef;
    out.J0[i] *= ef;
    out.ui[i] *= eb;
    out.uid[i] *= eb;
    out.Jinf[i] *= eb;
    out.logs[i] = lf + lb;
  }
  for (int k = 0; k < 3; ++k) {
    const double r = out.radii[k];
    cplx v, vd, J, u, ud, Ji;
    double lf, lb;
    fwd_at(r, v, vd, J, lf);
    bwd_at(r, u, ud, Ji, lb);
    const double e = std::exp(lf + lb);
    const double r6 = std::pow(r, 6);
    out.wr[k] = e * r6 * (v * ud - (vd + 0.5 * r * v) * u);
    out.wr_scale[k] = e * r6 * (std::abs(v * ud) + std::abs((vd + 0.5 * r * v) * u));
  }
  return out;
}

void check_wronskian(const ResolventQuery& q, const PairData& d) {
  const double rel = std::abs(d.wr[1]) / d.wr_scale[1];
  if (std::abs(q.lambda() - 1.0) < 1e-6 || rel < 1e-10) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "lambda = %.12g%+.12gi is an eigenvalue to working accuracy (relative Wronskian %.3g)",
                  q.alpha, q.omega, rel);
    throw SingularityError(buf);
  }
}

double wronskian_spread(const PairData& d) {
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s = std::max(s, std::abs(d.wr[k] - d.wr[1]) / std::abs(d.wr[1]));
  return s;
}

}  // namespace

FundamentalPair fundamental_pair(const ResolventQuery& q, GridPtr grid, const ResolventOptions& opt) {
  const PairData d = integrate_pair(q, *grid, [](double) { return cplx(0.0); }, opt);
  check_wronskian(q, d);
  FundamentalPair p;
  p.query = q;
  p.grid = grid;
  p.v_origin = {grid, d.v0};
  p.v_origin_d = {grid, d.v0d};
  p.v_infinity = {grid, d.ui};
  p.v_infinity_d = {grid, d.uid};
  p.wronskian = d.wr[1];
  p.check_radii = d.radii;
  p.wronskian_samples = d.wr;
  p.wronskian_spread = wronskian_spread(d);
  p.scale_logs = d.logs;
  return p;
}

ComplexField apply_shifted_operator(const ResolventQuery& q, const ComplexField& w) {
  const RadialGrid& g = *w.grid;
  const cplx lambda = q.lambda();
  const auto dw = g.d1(std::span<const cplx>(w.values), Parity::Even);
  const auto ddw = g.d2(std::span<const cplx>(w.values), Parity::Even);
  ComplexField out{w.grid, std::vector<cplx>(w.values.size())};
  for (std::size_t i = 0; i < w.values.size(); ++i) {
    const double r = g.node(i);
    const cplx lap = r == 0.0 ? 7.0 * ddw[i] : ddw[i] + 6.0 / r * dw[i];
    const cplx Lw = lap - 0.5 * r * dw[i] - w.values[i] + potential_v(r) * w.values[i];
    out.values[i] = lambda * w.values[i] - Lw;
  }
  return out;
}

ResolventSolution apply_resolvent(const ResolventQuery& q, const ComplexField& f,
                                  const ResolventOptions& opt) {
  const RadialGrid& g = *f.grid;
  ResolventSolution sol;
  sol.w = {f.grid, std::vector<cplx>(f.values.size(), 0.0)};
  bool zero = true;
  for (const cplx& v : f.values) zero = zero && v == 0.0;
  if (zero) return sol;

  // Beyond the last node where f is significant the interpolant is pure
  // rounding noise, which the step-size control would otherwise chase.
  double fmax = 0.0;
  for (const cplx& v : f.values) fmax = std::max(fmax, std::abs(v));
  double r_cut = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    if (std::abs(f.values[i]) > 1e-13 * fmax) r_cut = g.node(std::min(i + 1, f.values.size() - 1));
  const auto interp = g.interpolant(std::span<const cplx>(f.values));
  auto fn = [&](double r) { return r > r_cut ? cplx(0.0) : interp(r); };
  const PairData d = integrate_pair(q, g, fn, opt);
  check_wronskian(q, d);
  const cplx C = d.wr[1];
  const std::vector<double>& x = g.nodes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    sol.w.values[i] = -(d.ui[i] * d.J0[i] + d.v0[i] * d.Jinf[i]) / C;
  }
  if (x[0] == 0.0) {
    // w is even and smooth: extrapolate in rho^2 from the first positive nodes.
    const std::size_t m = std::min<std::size_t>(8, x.size() - 1);
    std::vector<double> s2(m);
    std::vector<cplx> p(m);
    for (std::size_t k = 0; k < m; ++k) {
      s2[k] = x[k + 1] * x[k + 1];
      p[k] = sol.w.values[k + 1];
    }
    for (std::size_t lev = 1; lev < m; ++lev)
      for (std::size_t k = 0; k + lev < m; ++k)
        p[k] = (s2[k + lev] * p[k] - s2[k] * p[k + 1]) / (s2[k + lev] - s2[k]);
    sol.w.values[0] = p[0];
  }

  const ComplexField back = apply_shifted_operator(q, sol.w);
  ComplexField diff{f.grid, std::vector<cplx>(f.values.size())};
  for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] = back.values[i] - f.values[i];
  sol.residual = l2_norm(diff) / l2_norm(f);
  if (opt.check_residual && !(sol.residual < opt.residual_tol)) {
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "resolvent residual %.3g exceeds %.1g at lambda = %.6g%+.6gi (Wronskian spread %.3g)",
                  sol.residual, opt.residual_tol, q.alpha, q.omega, wronskian_spread(d));
    throw AccuracyError(buf);
  }
  return sol;
}

ResolventSolution apply_resolvent(const ResolventQuery& q, const RadialField& f,
                                  const ResolventOptions& opt) {
  return apply_resolvent(q, ComplexField::from_real(f), opt);
}

std::vector<RadialField> default_probes(GridPtr grid) {
  const double centres[] = {0.0, 1.5, 3.0, 6.0};
  const double widths[] = {0.75, 2.0};
  std::vector<RadialField> out;
  for (double c : centres) {
    for (double w : widths) {
      RadialField p = RadialField::sample(grid, [=](double r) {
        return std::exp(-(r - c) * (r - c) / (w * w)) + std::exp(-(r + c) * (r + c) / (w * w));
      });
      const double nh = norm_H(p);
      for (double& v : p.values) v /= nh;
      out.push_back(std::move(p));
    }
  }
  return out;
}

ScanSummary resolvent_bound_scan(double alpha, const std::vector<double>& omegas,
                                 const std::vector<RadialField>& probes, const ResolventOptions& opt) {
  ScanSummary s;
  if (probes.empty()) return s;
  ResolventOptions o = opt;
  o.check_residual = false;
  for (double om : omegas) {
    const ResolventQuery q{alpha, om};
    double best = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      ScanRow row;
      row.alpha = alpha;
      row.omega = om;
      row.probe_id = static_cast<int>(k);
      try {
        const ResolventSolution sol = apply_resolvent(q, probes[k], o);
        row.residual = sol.residual;
        row.ratio = norm_H(sol.w) / norm_H(probes[k]);
        if (!(sol.residual < opt.residual_tol)) row.status = "accuracy";
      } catch (const SingularityError&) {
        row.status = "singular";
      } catch (const Error& e) {
        row.status = "error";
      }
      if (row.status == "ok") {
        best = std::max(best, row.ratio);
        any = true;
        s.max_residual = std::max(s.max_residual, row.residual);
      }
      s.rows.push_back(row);
    }
    if (any) {
      s.omegas.push_back(om);
      s.max_ratio.push_back(best);
    }
  }
  // Slope of log(max ratio) against log|omega| over rows with |omega| >= 1.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < s.omegas.size(); ++i) {
    if (std::abs(s.omegas[i]) < 1.0) continue;
    const double lx = std::log(std::abs(s.omegas[i])), ly = std::log(s.max_ratio[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m >= 2) s.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return s;
}

}  // namespace ymflow
