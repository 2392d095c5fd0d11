#include "ymflow/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <lapacke.h>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"
#include "ymflow/kernels.hpp"

namespace ymflow {

namespace {

constexpr double kPi = std::numbers::pi;

// lim rho^2 V(rho) = 12 (sqrt6 - 2)
double v_infinity() { return 12.0 * (consts::sqrt6() - 2.0); }

// Scaled variable  ut = exp(-rho^2/4) u:
//   ut'' + (rho/2 + 6/rho) ut' + (5/2 + V - lambda) ut = 0.
struct ScaledRhs {
  cplx lambda;
  void operator()(const CState<2>& y, CState<2>& dy, double r) const {
    dy[0] = y[1];
    dy[1] = -(0.5 * r + 6.0 / r) * y[1] - (2.5 + potential_v(r) - lambda) * y[0];
  }
};

// Unscaled variable u: u'' + (6/rho - rho/2) u' + (V - 1 - lambda) u = 0.
struct RawRhs {
  cplx lambda;
  void operator()(const CState<2>& y, CState<2>& dy, double r) const {
    dy[0] = y[1];
    dy[1] = -(6.0 / r - 0.5 * r) * y[1] - (potential_v(r) - 1.0 - lambda) * y[0];
  }
};

cplx series_value(const std::vector<cplx>& c, double r) {
  cplx acc = 0.0;
  const double r2 = r * r;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * r2 + c[k];
  return acc;
}

cplx series_derivative(const std::vector<cplx>& c, double r) {
  cplx acc = 0.0;
  const double r2 = r * r;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * r2 + 2.0 * static_cast<double>(k) * c[k];
  return acc * r;
}

}  // namespace

std::pair<cplx, cplx> recessive_start(cplx lambda, double R) {
  const cplx s = 2.0 * (lambda + 1.0);
  const cplx a = -(s * (s - 5.0) + v_infinity());
  const cplx u = 1.0 + a / (R * R);
  const cplx du = -s / R - (s + 2.0) * a / (R * R * R);
  return {u, du};
}

std::vector<double> potential_taylor(int order) {
  const double a1 = consts::a1();
  const double a2 = consts::a2();
  const double q = -a1 / a2;
  std::vector<double> v(order + 1);
  double qk = 1.0;
  double qkm1 = 0.0;
  for (int k = 0; k <= order; ++k) {
    const double Wk = -qk / a2;
    const double W2km1 = k == 0 ? 0.0 : static_cast<double>(k) * qkm1 / (a2 * a2);
    v[k] = -18.0 * Wk - 9.0 * W2km1;
    qkm1 = qk;
    qk *= q;
  }
  return v;
}

std::vector<cplx> frobenius_coefficients(cplx lambda, int order) {
  const std::vector<double> v = potential_taylor(order);
  std::vector<cplx> c(order + 1);
  c[0] = 1.0;
  for (int m = 0; m < order; ++m) {
    cplx conv = 0.0;
    for (int j = 0; j <= m; ++j) conv += v[j] * c[m - j];
    c[m + 1] = ((m + 1.0 + lambda) * c[m] - conv) / (2.0 * (m + 1.0) * (2.0 * m + 7.0));
  }
  return c;
}

FrobeniusLaunch frobenius_launch(cplx lambda, double rho0, int order) {
  if (order < 6) throw DomainError("Frobenius order must be at least 6");
  if (!(rho0 > 0.0) || rho0 > 0.5) throw DomainError("launch radius must lie in (0, 0.5]");
  const std::vector<cplx> c = frobenius_coefficients(lambda, order);
  double r = rho0;
  for (;;) {
    const double r2 = r * r;
    const double last = std::abs(c[order]) * std::pow(r2, order);
    const double prev = std::abs(c[order - 1]) * std::pow(r2, order - 1);
    const cplx u = series_value(c, r);
    // Ratio test on the last two terms.
    const bool converging = prev == 0.0 || last <= 0.5 * prev;
    if (converging) {
      FrobeniusLaunch fl;
      fl.rho0 = r;
      fl.u = u;
      fl.du = series_derivative(c, r);
      fl.tail = std::abs(u) > 0.0 ? last / std::abs(u) : last;
      return fl;
    }
    r *= 0.5;
    if (r < 1e-4) throw DomainError("Frobenius series does not converge above rho = 1e-4");
  }
}

cplx shoot_matching(cplx lambda, const RadialGrid& grid, const ShootOptions& opt) {
  return shoot_matching(lambda, grid.r_max(), opt);
}

cplx shoot_matching(cplx lambda, double r_max, const ShootOptions& opt) {
  if (r_max < 20.0) throw DomainError("shooting needs R_max >= 20");
  const FrobeniusLaunch fl = frobenius_launch(lambda, opt.rho0, opt.order);
  const double r0 = fl.rho0;
  const double e = std::exp(-0.25 * r0 * r0);
  CState<2> y{e * fl.u, e * (fl.du - 0.5 * r0 * fl.u)};
  const std::vector<double> none;
  const auto tr = integrate_stops<2>(ScaledRhs{lambda}, y, r0, r_max, none, opt.ode);
  const cplx ut = tr.y.back()[0] * std::exp(tr.log_scale.back());
  return ut * std::pow(cplx(r_max), 5.0 - 2.0 * lambda);
}

AssembledMode assemble_eigenfunction(cplx lambda, GridPtr grid, const ShootOptions& opt) {
  const RadialGrid& g = *grid;
  if (!g.contains_origin()) throw DomainError("eigenfunction assembly needs a grid from 0");
  const double R = g.r_max();
  const std::vector<double>& x = g.nodes();
  const FrobeniusLaunch fl = frobenius_launch(lambda, opt.rho0, opt.order);
  const double r0 = fl.rho0;

  // Matching radius: the node closest to 3 (or R/2 on short grids).
  const double target = std::min(3.0, 0.5 * R);
  std::size_t im = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - target) < std::abs(x[im] - target)) im = i;
  if (x[im] <= r0) throw DomainError("matching radius inside the launch radius");
  const double rm = x[im];

  std::vector<double> fwd_stops, bwd_stops;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > r0 && i <= im) fwd_stops.push_back(x[i]);
  }
  for (std::size_t i = x.size(); i-- > im;) {
    if (x[i] < R) bwd_stops.push_back(x[i]);
  }

  const double e0 = std::exp(-0.25 * r0 * r0);
  CState<2> y0{e0 * fl.u, e0 * (fl.du - 0.5 * r0 * fl.u)};
  const auto fw = integrate_stops<2>(ScaledRhs{lambda}, y0, r0, rm, fwd_stops, opt.ode);

  const auto [uR, duR] = recessive_start(lambda, R);
  CState<2> yR{uR, duR};
  const auto bw = integrate_stops<2>(RawRhs{lambda}, yR, R, rm, bwd_stops, opt.ode);

  // Forward values in u variables at the matching node.
  const CState<2>& fm = fw.y[fwd_stops.size() - 1];
  const double em = std::exp(0.25 * rm * rm + fw.log_scale[fwd_stops.size() - 1]);
  const cplx u_f = em * fm[0];
  const cplx du_f = em * (fm[1] + 0.5 * rm * fm[0]);
  const CState<2>& bm = bw.y[bwd_stops.size() - 1];
  const double eb = std::exp(bw.log_scale[bwd_stops.size() - 1]);
  const cplx u_b = eb * bm[0];
  const cplx du_b = eb * bm[1];
  const cplx scale = u_f / u_b;

  AssembledMode out;
  out.match_radius = rm;
  out.derivative_mismatch = std::abs(du_f - scale * du_b) / std::max(std::abs(du_f), 1e-300);
  out.u.grid = grid;
  out.u.values.assign(x.size(), 0.0);

  const std::vector<cplx> c = frobenius_coefficients(lambda, opt.order);
  std::size_t kf = 0;
  for (std::size_t i = 0; i < x.size() && i <= im; ++i) {
    if (x[i] <= r0) {
      out.u.values[i] = series_value(c, x[i]);
    } else {
      out.u.values[i] = std::exp(0.25 * x[i] * x[i] + fw.log_scale[kf]) * fw.y[kf][0];
      ++kf;
    }
  }
  // Backward stops run from the outermost node inwards, ending at the matching node.
  for (std::size_t k = 0; k < bwd_stops.size(); ++k) {
    const std::size_t i = x.size() - 1 - (R == x.back() ? k + 1 : k);
    if (i <= im) continue;
    out.u.values[i] = scale * std::exp(bw.log_scale[k]) * bw.y[k][0];
  }
  out.u.values.back() = scale * uR;
  return out;
}

namespace {

struct ContourPoint {
  double s;  // perimeter parameter in [0, 4)
  cplx z;
  cplx F;
};

cplx boundary_point(const Window& w, double s) {
  // Counter-clockwise: bottom, right, top, left.
  if (s < 1.0) return {w.re_min + s * (w.re_max - w.re_min), w.im_min};
  if (s < 2.0) return {w.re_max, w.im_min + (s - 1.0) * (w.im_max - w.im_min)};
  if (s < 3.0) return {w.re_max - (s - 2.0) * (w.re_max - w.re_min), w.im_max};
  return {w.re_min, w.im_max - (s - 3.0) * (w.im_max - w.im_min)};
}

struct ContourScan {
  int winding = 0;
  cplx first_moment = 0.0;  // (1/2 pi i) \oint z F'/F dz
  double min_step = 4.0;
};

ContourScan scan_contour(const Window& w, double r_max, const SearchOptions& opt) {
  auto eval = [&](double s) {
    const cplx z = boundary_point(w, s);
    return ContourPoint{s, z, shoot_matching(z, r_max, opt.shoot)};
  };
  const int n = std::max(8, opt.boundary_points);
  std::vector<ContourPoint> pts;
  for (int k = 0; k < n; ++k) pts.push_back(eval(4.0 * k / n));

  ContourScan out;
  double total_arg = 0.0;
  cplx moment = 0.0;
  // Walk the closed polygon; refine any segment whose phase jumps too much.
  std::vector<std::pair<ContourPoint, ContourPoint>> stack;
  for (int k = n - 1; k >= 0; --k) {
    ContourPoint b = pts[(k + 1) % n];
    if (k + 1 == n) b.s = 4.0;
    stack.emplace_back(pts[k], b);
  }
  while (!stack.empty()) {
    auto [a, b] = stack.back();
    stack.pop_back();
    const cplx ratio = b.F / a.F;
    const double darg = std::arg(ratio);
    if (std::abs(darg) > kPi / 4.0 && (b.s - a.s) > 1e-7) {
      const double sm = 0.5 * (a.s + b.s);
      ContourPoint m = eval(std::fmod(sm, 4.0));
      m.s = sm;
      stack.emplace_back(m, b);
      stack.emplace_back(a, m);
      continue;
    }
    out.min_step = std::min(out.min_step, b.s - a.s);
    total_arg += darg;
    const cplx dlog(std::log(std::abs(ratio)), darg);
    moment += 0.5 * (a.z + b.z) * dlog;
  }
  out.winding = static_cast<int>(std::lround(total_arg / (2.0 * kPi)));
  out.first_moment = moment / cplx(0.0, 2.0 * kPi);
  return out;
}

cplx secant_root(cplx z0, double r_max, const SearchOptions& opt) {
  cplx a = z0;
  cplx b = z0 + cplx(1e-4, 1e-5);
  cplx Fa = shoot_matching(a, r_max, opt.shoot);
  cplx Fb = shoot_matching(b, r_max, opt.shoot);
  for (int it = 0; it < 60; ++it) {
    if (Fb == Fa) break;
    const cplx c = b - Fb * (b - a) / (Fb - Fa);
    a = b;
    Fa = Fb;
    b = c;
    Fb = shoot_matching(b, r_max, opt.shoot);
    if (std::abs(b - a) < opt.root_tol * std::max(1.0, std::abs(b))) break;
  }
  return b;
}

void search_window(const Window& w, GridPtr grid, const SearchOptions& opt, int depth,
                   SpectralResult& out) {
  const double R = grid->r_max();
  const ContourScan sc = scan_contour(w, R, opt);
  if (sc.min_step <= 1e-7) {
    out.notes.push_back("contour refinement hit its floor; a root may sit on the boundary");
  }
  if (sc.winding <= 0) return;
  if (sc.winding > 1 && depth < opt.max_depth) {
    const bool split_re = (w.re_max - w.re_min) >= (w.im_max - w.im_min);
    Window a = w, b = w;
    if (split_re) {
      const double m = 0.5 * (w.re_min + w.re_max) + 1.234e-3 * (w.re_max - w.re_min);
      a.re_max = m;
      b.re_min = m;
    } else {
      const double m = 0.5 * (w.im_min + w.im_max) + 1.234e-3 * (w.im_max - w.im_min);
      a.im_max = m;
      b.im_min = m;
    }
    search_window(a, grid, opt, depth + 1, out);
    search_window(b, grid, opt, depth + 1, out);
    return;
  }
  const cplx guess = sc.winding == 1 ? sc.first_moment
                                     : cplx(0.5 * (w.re_min + w.re_max), 0.5 * (w.im_min + w.im_max));
  const cplx root = secant_root(guess, R, opt);
  Eigenpair ep;
  ep.lambda = root;
  ep.method = "shooting";
  AssembledMode mode = assemble_eigenfunction(root, grid, opt.shoot);
  ep.residual = mode.derivative_mismatch;
  ep.eigenfunction = std::move(mode.u);
  if (sc.winding > 1) out.notes.push_back("unresolved cluster of " + std::to_string(sc.winding) + " roots");
  out.eigenvalues.push_back(std::move(ep));
}

bool near_boundary(const Window& w, cplx z, double tol) {
  const bool inside = z.real() >= w.re_min - tol && z.real() <= w.re_max + tol &&
                      z.imag() >= w.im_min - tol && z.imag() <= w.im_max + tol;
  if (!inside) return false;
  return std::abs(z.real() - w.re_min) < tol || std::abs(z.real() - w.re_max) < tol ||
         std::abs(z.imag() - w.im_min) < tol || std::abs(z.imag() - w.im_max) < tol;
}

}  // namespace

int count_zeros(const Window& window, double r_max, const SearchOptions& opt) {
  if (window.degenerate()) return 0;
  return scan_contour(window, r_max, opt).winding;
}

SpectralResult find_eigenvalues(const Window& window, GridPtr grid, const SearchOptions& opt) {
  SpectralResult out;
  out.method = "shooting";
  out.window = window;
  out.grid = grid;
  if (window.degenerate()) return out;
  if (window.re_min <= -0.25) {
    out.notes.push_back("window extends to Re lambda <= -1/4, where continuous spectrum may appear");
  }
  Window w = window;
  for (int attempt = 0; attempt < 3; ++attempt) {
    SpectralResult trial = out;
    search_window(w, grid, opt, 0, trial);
    bool hit = false;
    for (const auto& ep : trial.eigenvalues) hit = hit || near_boundary(w, ep.lambda, 1e-3);
    if (!hit) {
      trial.window = w;
      std::sort(trial.eigenvalues.begin(), trial.eigenvalues.end(),
                [](const Eigenpair& a, const Eigenpair& b) { return a.lambda.real() > b.lambda.real(); });
      return trial;
    }
    out.notes.push_back("root within 1e-3 of the contour; window perturbed and retried");
    const double dr = 2.5e-3 * (attempt + 1);
    w.re_min -= dr;
    w.re_max += dr;
    w.im_min -= dr;
    w.im_max += dr;
  }
  SpectralResult last = out;
  search_window(w, grid, opt, 0, last);
  last.window = w;
  return last;
}

Eigen::MatrixXd collocation_operator(const RadialGrid& grid) {
  if (grid.kind() != GridKind::Chebyshev) throw DomainError("collocation needs a Chebyshev grid");
  const Eigen::MatrixXd D1 = grid.d1_matrix(Parity::Even);
  const Eigen::MatrixXd D2 = grid.d2_matrix(Parity::Even);
  const std::size_t n = grid.size();
  Eigen::MatrixXd L(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid.node(i);
    if (i == 0) {
      L.row(i) = 7.0 * D2.row(i);
    } else {
      L.row(i) = D2.row(i) + (6.0 / r - 0.5 * r) * D1.row(i);
    }
    L(i, i) += potential_v(r) - 1.0;
  }
  return L;
}

Eigen::MatrixXd collocation_operator_dirichlet(const RadialGrid& grid) {
  const Eigen::MatrixXd L = collocation_operator(grid);
  const Eigen::Index m = L.rows() - 1;
  return L.topLeftCorner(m, m);
}

SpectralResult collocation_spectrum(GridPtr grid, int n_modes, FarField closure, double cutoff) {
  const RadialGrid& g = *grid;
  Eigen::MatrixXd M;
  if (closure == FarField::Dirichlet) {
    M = collocation_operator_dirichlet(g);
  } else {
    // u'(R) = -(2(lambda + 1)/R) u(R): the last row becomes (D1 + 2/R e) u = lambda (-2/R) u_R.
    M = collocation_operator(g);
    const std::size_t n = g.size() - 1;
    const double R = g.r_max();
    M.row(n) = g.d1_matrix(Parity::Even).row(n);
    M(n, n) += 2.0 / R;
    M.row(n) /= (-2.0 / R);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
  if (es.info() != Eigen::Success) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    throw AccuracyError("collocation eigen-solver failed; condition estimate " +
                        std::to_string(s(0) / s(s.size() - 1)));
  }
  const Eigen::VectorXcd ev = es.eigenvalues();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i).real() > cutoff) idx.push_back(i);
  std::sort(idx.begin(), idx.end(),
            [&](Eigen::Index a, Eigen::Index b) { return ev(a).real() > ev(b).real(); });
  if (static_cast<int>(idx.size()) > n_modes) idx.resize(n_modes);

  SpectralResult out;
  out.method = closure == FarField::Dirichlet ? "collocation-dirichlet" : "collocation-robin";
  out.grid = grid;
  out.window = {cutoff, std::numeric_limits<double>::infinity(),
                -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const Eigen::MatrixXcd V = es.eigenvectors();
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const Eigen::Index i = idx[k];
    Eigenpair ep;
    ep.lambda = ev(i);
    ep.method = out.method;
    const Eigen::VectorXcd x = V.col(i);
    ep.residual = (M.cast<cplx>() * x - ev(i) * x).norm() / x.norm();
    if (k == 0) {
      ComplexField f;
      f.grid = grid;
      f.values.assign(g.size(), 0.0);
      const cplx norm0 = x(0);
      for (Eigen::Index j = 0; j < x.size(); ++j) f.values[j] = x(j) / norm0;
      ep.eigenfunction = std::move(f);
    }
    out.eigenvalues.push_back(std::move(ep));
  }
  return out;
}

RadialField susy_transform(const RadialField& u) {
  RadialField v{u.grid, std::vector<double>(u.size())};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = u.grid->node(i);
    v.values[i] = r * r * r * std::exp(-0.125 * r * r) * u.values[i];
  }
  return v;
}

RadialField susy_inverse(const RadialField& v) {
  RadialField u{v.grid, std::vector<double>(v.size())};
  const RadialGrid& g = *v.grid;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double r = g.node(i);
    if (r > 0.0) u.values[i] = v.values[i] * std::exp(0.125 * r * r) / (r * r * r);
  }
  if (g.contains_origin()) {
    // Neville extrapolation to s = rho^2 = 0 from up to 16 nodes inside
    // rho < 1 (at least 4); farther nodes make the extrapolation worse.
    std::size_t m = 0;
    while (m < 16 && m + 1 < v.size() && (m < 4 || g.node(m + 1) < 1.0)) ++m;
    std::vector<double> s(m), p(m);
    for (std::size_t k = 0; k < m; ++k) {
      s[k] = g.node(k + 1) * g.node(k + 1);
      p[k] = u.values[k + 1];
    }
    for (std::size_t lev = 1; lev < m; ++lev)
      for (std::size_t k = 0; k + lev < m; ++k)
        p[k] = (s[k + lev] * p[k] - s[k] * p[k + 1]) / (s[k + lev] - s[k]);
    u.values[0] = p[0];
  }
  return u;
}

std::pair<RadialField, RadialField> factorization_ops(const RadialField& v) {
  const RadialGrid& g = *v.grid;
  if (g.r_min() <= 0.0) throw DomainError("factorization operators need a grid away from rho = 0");
  const std::vector<double> dv = g.d1(v.values, Parity::Even);
  RadialField B{v.grid, std::vector<double>(v.size())};
  RadialField Bp{v.grid, std::vector<double>(v.size())};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double b = susy_beta(g.node(i));
    B.values[i] = -dv[i] + b * v.values[i];
    Bp.values[i] = dv[i] + b * v.values[i];
  }
  return {B, Bp};
}

RadialField normal_form_residual(const RadialField& v, double lambda) {
  const RadialGrid& g = *v.grid;
  if (g.r_min() <= 0.0) throw DomainError("normal form residual needs rho > 0");
  const std::vector<double> d2v = g.d2(v.values, Parity::Even);
  RadialField r{v.grid, std::vector<double>(v.size())};
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double x = g.node(i);
    const double pot = x * x / 16.0 + 6.0 / (x * x) - 0.75 - potential_v(x);
    r.values[i] = lambda * v.values[i] - d2v[i] + pot * v.values[i];
  }
  return r;
}

Eigen::MatrixXd susy_matrix(const RadialGrid& grid) {
  if (grid.kind() != GridKind::Interval) throw DomainError("A is discretised on an interval grid");
  const std::size_t n = grid.size();
  const double h = grid.spacing();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, i) = 2.0 / (h * h) + susy_potential(grid.node(i));
    if (i + 1 < n) {
      A(i, i + 1) = -1.0 / (h * h);
      A(i + 1, i) = -1.0 / (h * h);
    }
  }
  return A;
}

SusyBound susy_ground_bound(GridPtr interval_grid, int n_lowest) {
  const RadialGrid& g = *interval_grid;
  if (g.kind() != GridKind::Interval) throw DomainError("A is discretised on an interval grid");
  const std::size_t n = g.size();
  const double h = g.spacing();
  // Assemble the three diagonals, then check symmetry of the stored pair.
  Eigen::VectorXd diag(n), upper(n - 1), lower(n - 1);
  for (std::size_t i = 0; i < n; ++i) diag(i) = 2.0 / (h * h) + susy_potential(g.node(i));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    upper(i) = -1.0 / (h * h);
    lower(i) = -1.0 / (h * h);
  }
  SusyBound out;
  out.symmetry_defect = (upper - lower).cwiseAbs().maxCoeff() / (1.0 / (h * h));
  if (out.symmetry_defect > 1e-10) throw AccuracyError("assembled A is not symmetric");
  // Only the lowest few eigenpairs are needed: LAPACK's MRRR solver by index range.
  const lapack_int nn = static_cast<lapack_int>(n);
  const lapack_int il = 1;
  const lapack_int iu = std::min<lapack_int>(std::max(n_lowest, 1), nn);
  std::vector<double> d(diag.data(), diag.data() + n), e(upper.data(), upper.data() + n - 1);
  e.push_back(0.0);
  std::vector<double> w(n), z(n * static_cast<std::size_t>(iu));
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(iu));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', nn, d.data(), e.data(), 0.0, 0.0,
                                         il, iu, 0.0, &found, w.data(), z.data(), nn, isuppz.data());
  if (info != 0 || found < 1) throw AccuracyError("tridiagonal eigen-solver failed");
  out.rayleigh_min = w[0];
  for (lapack_int k = 0; k < found; ++k) out.lowest.push_back(w[k]);
  out.ground_state = Eigen::Map<const Eigen::VectorXd>(z.data(), static_cast<Eigen::Index>(n));
  return out;
}

double SpectralProjection::g_coefficient(std::span<const double> f) const {
  const Eigen::Index m = P.rows();
  if (static_cast<Eigen::Index>(f.size()) < m) throw DomainError("field shorter than projection");
  Eigen::VectorXcd x(m);
  for (Eigen::Index i = 0; i < m; ++i) x(i) = f[i];
  const Eigen::VectorXd pf = (P * x).real();
  const auto& w = grid->weights();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    num += w[i] * g_samples(i) * pf(i);
    den += w[i] * g_samples(i) * g_samples(i);
  }
  return num / den;
}

SpectralProjection spectral_projection(GridPtr grid, int points, double radius) {
  const Eigen::MatrixXd L = collocation_operator_dirichlet(*grid);
  const Eigen::Index m = L.rows();

  // Keep the circle away from discrete eigenvalues.
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(L, false).eigenvalues();
  for (int tries = 0; tries < 20; ++tries) {
    bool close = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      close = close || std::abs(std::abs(ev(i) - 1.0) - radius) < 1e-6;
    if (!close) break;
    radius *= 1.01;
  }

  const Eigen::MatrixXcd Lc = L.cast<cplx>();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(m, m);
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(m, m);
  for (int k = 0; k < points; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / points;
    const cplx e = std::polar(1.0, th);
    const cplx z = 1.0 + radius * e;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(z * I - Lc);
    P += (radius * e / static_cast<double>(points)) * lu.solve(I);
  }

  SpectralProjection out;
  out.P = P;
  out.radius = radius;
  out.grid = grid;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(P);
  const Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(s.size(), 8); ++i) out.singular_values.push_back(s(i));
  out.rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > 1e-6 * s(0)) ++out.rank;
  const Eigen::MatrixXcd P2 = P * P;
  out.idempotency_defect = (P2 - P).norm() / P.norm();
  const ClosedForm g = symmetry_mode();
  out.g_samples.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.g_samples(i) = g(grid->node(i));
  return out;
}

}  // namespace ymflow
