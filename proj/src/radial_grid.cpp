#include "ymflow/radial_grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <type_traits>

#include "ymflow/errors.hpp"
#include "ymflow/kernels.hpp"

namespace ymflow {

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::Uniform: return "uniform";
    case GridKind::Interval: return "interval";
    case GridKind::Chebyshev: return "chebyshev-mapped";
  }
  return "unknown";
}

std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
  // Fornberg's recursion; c[j][k] is the weight of node j for derivative k.
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const int mn = std::min<int>(static_cast<int>(i), m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = c[j][m];
  return w;
}

GridPtr RadialGrid::uniform(std::size_t n_intervals, double r_max, int order) {
  if (order != 2 && order != 4) throw DomainError("stencil order must be 2 or 4");
  if (n_intervals < 8) throw DomainError("uniform grid needs at least 8 intervals");
  if (!(r_max > 0.0)) throw DomainError("R_max must be positive");
  auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
  g->kind_ = GridKind::Uniform;
  g->order_ = order;
  g->resolution_ = n_intervals;
  g->h_ = r_max / static_cast<double>(n_intervals);
  g->nodes_.resize(n_intervals + 1);
  g->weights_.assign(n_intervals + 1, g->h_);
  for (std::size_t i = 0; i <= n_intervals; ++i) g->nodes_[i] = g->h_ * static_cast<double>(i);
  g->nodes_.back() = r_max;
  g->weights_.front() *= 0.5;
  g->weights_.back() *= 0.5;
  g->build_fd_rows(true);
  return g;
}

GridPtr RadialGrid::interval(double a, double b, std::size_t n_intervals, int order) {
  if (order != 2 && order != 4) throw DomainError("stencil order must be 2 or 4");
  if (!(a > 0.0) || !(b > a)) throw DomainError("interval grid needs 0 < a < b");
  if (n_intervals < 8) throw DomainError("interval grid needs at least 8 intervals");
  auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
  g->kind_ = GridKind::Interval;
  g->order_ = order;
  g->resolution_ = n_intervals;
  g->h_ = (b - a) / static_cast<double>(n_intervals);
  g->nodes_.resize(n_intervals + 1);
  g->weights_.assign(n_intervals + 1, g->h_);
  for (std::size_t i = 0; i <= n_intervals; ++i) g->nodes_[i] = a + g->h_ * static_cast<double>(i);
  g->nodes_.back() = b;
  g->weights_.front() *= 0.5;
  g->weights_.back() *= 0.5;
  g->build_fd_rows(false);
  return g;
}

GridPtr RadialGrid::chebyshev(std::size_t n, double r_max, double map_scale) {
  if (n < 8) throw DomainError("Chebyshev grid needs n >= 8");
  if (!(map_scale > 0.0) || !(map_scale < r_max)) throw DomainError("need 0 < L < R_max");
  auto g = std::shared_ptr<RadialGrid>(new RadialGrid());
  g->kind_ = GridKind::Chebyshev;
  g->order_ = 0;
  g->resolution_ = n;
  g->map_scale_ = map_scale;
  g->nodes_.assign(n + 1, 0.0);
  g->nodes_.back() = r_max;
  g->build_chebyshev();
  return g;
}

void RadialGrid::build_fd_rows(bool reflect_at_origin) {
  const std::size_t n = nodes_.size();
  const int s = order_ / 2;
  const double h = h_;

  auto centered = [&](int m) {
    std::vector<double> off;
    for (int o = -s; o <= s; ++o) off.push_back(o * h);
    return fd_weights(0.0, off, m);
  };
  const std::vector<double> c1 = centered(1);
  const std::vector<double> c2 = centered(2);

  auto one_sided = [&](std::size_t i, int m, std::size_t npts, bool from_left) {
    StencilRow row;
    row.start = from_left ? 0 : n - npts;
    std::vector<double> x(npts);
    for (std::size_t k = 0; k < npts; ++k) x[k] = nodes_[row.start + k];
    row.w = fd_weights(nodes_[i], x, m);
    return row;
  };

  auto centered_row = [&](std::size_t i, const std::vector<double>& c, double sign) {
    // Indices below zero reflect onto the positive nodes with the parity sign.
    const long lo = static_cast<long>(i) - s;
    StencilRow row;
    row.start = static_cast<std::size_t>(std::max<long>(lo, 0));
    row.w.assign(i + s + 1 - row.start, 0.0);
    for (int o = -s; o <= s; ++o) {
      long j = static_cast<long>(i) + o;
      double f = c[o + s];
      if (j < 0) {
        j = -j;
        f *= sign;
      }
      row.w[static_cast<std::size_t>(j) - row.start] += f;
    }
    return row;
  };

  for (int parity = 0; parity < 2; ++parity) {
    const double sign = parity == 0 ? 1.0 : -1.0;
    auto& r1 = parity == 0 ? d1_even_ : d1_odd_;
    auto& r2 = parity == 0 ? d2_even_ : d2_odd_;
    r1.clear();
    r2.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const bool left_ok = reflect_at_origin || i >= static_cast<std::size_t>(s);
      const bool right_ok = i + s < n;
      if (left_ok && right_ok) {
        r1.push_back(centered_row(i, c1, sign));
        r2.push_back(centered_row(i, c2, sign));
      } else {
        const bool from_left = !left_ok;
        r1.push_back(one_sided(i, 1, order_ + 1, from_left));
        r2.push_back(one_sided(i, 2, order_ + 2, from_left));
      }
    }
  }
}

namespace {

// Clenshaw-Curtis weights on the M+1 Chebyshev extreme points of [-1, 1].
std::vector<double> clenshaw_curtis(std::size_t M) {
  std::vector<double> w(M + 1);
  const double pi = std::numbers::pi;
  for (std::size_t k = 0; k <= M; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= M / 2; ++j) {
      const double b = (2 * j == M) ? 1.0 : 2.0;
      s += b / (4.0 * j * j - 1.0) * std::cos(2.0 * j * k * pi / M);
    }
    const double c = (k == 0 || k == M) ? 1.0 : 2.0;
    w[k] = c / M * (1.0 - s);
  }
  return w;
}

}  // namespace

void RadialGrid::build_chebyshev() {
  const std::size_t n = resolution_;
  const std::size_t M = 2 * n;
  const double pi = std::numbers::pi;
  const double R = nodes_.back();
  const double L = map_scale_;
  const double kappa = 1.0 - L / R;

  std::vector<double> x(M + 1);
  for (std::size_t k = 0; k <= M; ++k) x[k] = std::cos(pi * k / M);
  x[n] = 0.0;

  // Full differentiation matrix (negative-sum diagonal).
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M + 1, M + 1);
  auto cfac = [&](std::size_t k) { return (k == 0 || k == M) ? 2.0 : 1.0; };
  for (std::size_t i = 0; i <= M; ++i) {
    for (std::size_t j = 0; j <= M; ++j) {
      if (i == j) continue;
      const double sgn = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      D(i, j) = cfac(i) / cfac(j) * sgn / (x[i] - x[j]);
    }
  }
  for (std::size_t i = 0; i <= M; ++i) D(i, i) = -D.row(i).sum();
  const Eigen::MatrixXd D2 = D * D;

  // Fold onto k = 0..n, then reorder so that node j = n - k has increasing rho.
  auto fold = [&](const Eigen::MatrixXd& A, double sign) {
    Eigen::MatrixXd F(n + 1, n + 1);
    for (std::size_t k_row = 0; k_row <= n; ++k_row) {
      for (std::size_t k = 0; k <= n; ++k) {
        double v = A(k_row, k);
        if (k < n) v += sign * A(k_row, M - k);
        F(n - k_row, n - k) = v;
      }
    }
    return F;
  };

  xs_.resize(n + 1);
  std::vector<double> rp(n + 1), rpp(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double xj = x[n - j];
    xs_[j] = xj;
    const double s = 1.0 - kappa * xj * xj;
    nodes_[j] = L * xj / s;
    rp[j] = L * (1.0 + kappa * xj * xj) / (s * s);
    rpp[j] = 2.0 * L * kappa * xj * (3.0 + kappa * xj * xj) / (s * s * s);
  }
  nodes_.front() = 0.0;
  nodes_.back() = R;

  for (int parity = 0; parity < 2; ++parity) {
    const double sign = parity == 0 ? 1.0 : -1.0;
    const Eigen::MatrixXd F1 = fold(D, sign);
    const Eigen::MatrixXd F2 = fold(D2, sign);
    Eigen::MatrixXd R1(n + 1, n + 1), R2(n + 1, n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      R1.row(i) = F1.row(i) / rp[i];
      R2.row(i) = F2.row(i) / (rp[i] * rp[i]) - (rpp[i] / (rp[i] * rp[i] * rp[i])) * F1.row(i);
    }
    (parity == 0 ? cd1_even_ : cd1_odd_) = R1;
    (parity == 0 ? cd2_even_ : cd2_odd_) = R2;
  }

  const std::vector<double> cc = clenshaw_curtis(M);
  weights_.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const std::size_t k = n - j;
    const double wk = (k == n) ? 0.5 * cc[k] : cc[k];
    weights_[j] = wk * rp[j];
  }

  bary_nodes_ = x;
  bary_weights_.resize(M + 1);
  for (std::size_t k = 0; k <= M; ++k) {
    bary_weights_[k] = ((k % 2 == 0) ? 1.0 : -1.0) * ((k == 0 || k == M) ? 0.5 : 1.0);
  }
}

double RadialGrid::map_x_to_rho(double x) const {
  const double kappa = 1.0 - map_scale_ / nodes_.back();
  return map_scale_ * x / (1.0 - kappa * x * x);
}

double RadialGrid::map_rho_to_x(double rho) const {
  const double L = map_scale_;
  const double kappa = 1.0 - L / nodes_.back();
  return 2.0 * rho / (L + std::sqrt(L * L + 4.0 * kappa * rho * rho));
}

template <class T>
std::vector<T> RadialGrid::apply_rows(const std::vector<StencilRow>& rows,
                                      std::span<const T> u) const {
  std::vector<T> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const StencilRow& r = rows[i];
    T acc{};
    for (std::size_t k = 0; k < r.w.size(); ++k) acc += r.w[k] * u[r.start + k];
    out[i] = acc;
  }
  return out;
}

namespace {

// The interior of a finite-difference grid is a constant centered stencil;
// hand that range to the vectorised kernel.
std::vector<double> apply_fd(const std::vector<StencilRow>& rows, std::span<const double> u,
                             int order) {
  const std::size_t n = rows.size();
  std::vector<double> out(n);
  const std::size_t s = static_cast<std::size_t>(order / 2);
  const std::size_t lo = 2;  // stencil5 reads u[i-2]
  const std::size_t hi = n >= 2 ? n - 2 : 0;
  std::size_t begin = n, end = n;
  std::array<double, 5> c{};
  if (hi > lo + s) {
    // Rows [s, n-s) are centered; pick a representative from the middle.
    const StencilRow& mid = rows[n / 2];
    const std::size_t width = mid.w.size();
    const std::size_t pad = (5 - width) / 2;
    for (std::size_t k = 0; k < width; ++k) c[pad + k] = mid.w[k];
    begin = std::max(lo, s);
    end = std::min(hi, n - s);
    for (std::size_t i = begin; i < end; ++i) {
      if (rows[i].w.size() != width || rows[i].start + s != i) {
        begin = end = n;
        break;
      }
    }
    if (begin < end) kernels::active().stencil5(u.data(), out.data(), c.data(), 1.0, begin, end);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= begin && i < end) continue;
    const StencilRow& r = rows[i];
    double acc = 0.0;
    for (std::size_t k = 0; k < r.w.size(); ++k) acc += r.w[k] * u[r.start + k];
    out[i] = acc;
  }
  return out;
}

}  // namespace

std::vector<double> RadialGrid::d1(std::span<const double> u, Parity p) const {
  if (u.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ == GridKind::Chebyshev) {
    const Eigen::Map<const Eigen::VectorXd> v(u.data(), u.size());
    const Eigen::VectorXd r = (p == Parity::Even ? cd1_even_ : cd1_odd_) * v;
    return {r.data(), r.data() + r.size()};
  }
  return apply_fd(p == Parity::Even ? d1_even_ : d1_odd_, u, order_);
}

std::vector<double> RadialGrid::d2(std::span<const double> u, Parity p) const {
  if (u.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ == GridKind::Chebyshev) {
    const Eigen::Map<const Eigen::VectorXd> v(u.data(), u.size());
    const Eigen::VectorXd r = (p == Parity::Even ? cd2_even_ : cd2_odd_) * v;
    return {r.data(), r.data() + r.size()};
  }
  return apply_fd(p == Parity::Even ? d2_even_ : d2_odd_, u, order_);
}

std::vector<std::complex<double>> RadialGrid::d1(std::span<const std::complex<double>> u,
                                                 Parity p) const {
  if (u.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ == GridKind::Chebyshev) {
    const Eigen::Map<const Eigen::VectorXcd> v(u.data(), u.size());
    const Eigen::VectorXcd r = (p == Parity::Even ? cd1_even_ : cd1_odd_) * v;
    return {r.data(), r.data() + r.size()};
  }
  return apply_rows<std::complex<double>>(p == Parity::Even ? d1_even_ : d1_odd_, u);
}

std::vector<std::complex<double>> RadialGrid::d2(std::span<const std::complex<double>> u,
                                                 Parity p) const {
  if (u.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ == GridKind::Chebyshev) {
    const Eigen::Map<const Eigen::VectorXcd> v(u.data(), u.size());
    const Eigen::VectorXcd r = (p == Parity::Even ? cd2_even_ : cd2_odd_) * v;
    return {r.data(), r.data() + r.size()};
  }
  return apply_rows<std::complex<double>>(p == Parity::Even ? d2_even_ : d2_odd_, u);
}

Eigen::MatrixXd RadialGrid::d1_matrix(Parity p) const {
  if (kind_ == GridKind::Chebyshev) return p == Parity::Even ? cd1_even_ : cd1_odd_;
  const auto& rows = d1_rows(p);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].w.size(); ++k) M(i, rows[i].start + k) += rows[i].w[k];
  return M;
}

Eigen::MatrixXd RadialGrid::d2_matrix(Parity p) const {
  if (kind_ == GridKind::Chebyshev) return p == Parity::Even ? cd2_even_ : cd2_odd_;
  const auto& rows = d2_rows(p);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(size(), size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].w.size(); ++k) M(i, rows[i].start + k) += rows[i].w[k];
  return M;
}

const std::vector<StencilRow>& RadialGrid::d1_rows(Parity p) const {
  return p == Parity::Even ? d1_even_ : d1_odd_;
}

const std::vector<StencilRow>& RadialGrid::d2_rows(Parity p) const {
  return p == Parity::Even ? d2_even_ : d2_odd_;
}

template <class T>
T RadialGrid::interpolate_impl(std::span<const T> values, double rho) const {
  if (values.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ == GridKind::Chebyshev) {
    const double x = map_rho_to_x(std::abs(rho));
    const std::size_t n = resolution_;
    const std::size_t M = 2 * n;
    for (std::size_t j = 0; j <= n; ++j) {
      if (x == xs_[j]) return values[j];
    }
    std::vector<double> fre(M + 1), fim(M + 1);
    for (std::size_t k = 0; k <= M; ++k) {
      const std::size_t j = k <= n ? n - k : k - n;
      if constexpr (std::is_same_v<T, double>) {
        fre[k] = values[j];
        fim[k] = 0.0;
      } else {
        fre[k] = values[j].real();
        fim[k] = values[j].imag();
      }
    }
    const kernels::BarySums s = kernels::active().barycentric(
        bary_nodes_.data(), bary_weights_.data(), fre.data(), fim.data(), x, M + 1);
    if constexpr (std::is_same_v<T, double>) {
      return s.num_re / s.den;
    } else {
      return T(s.num_re / s.den, s.num_im / s.den);
    }
  }
  // Cubic Lagrange through four neighbouring nodes; the even reflection
  // supplies nodes left of the origin on uniform grids.
  const double a = nodes_.front();
  const long n = static_cast<long>(size());
  double r = rho;
  if (kind_ == GridKind::Uniform) r = std::abs(rho);
  long i0 = static_cast<long>(std::floor((r - a) / h_)) - 1;
  if (kind_ == GridKind::Interval) i0 = std::clamp<long>(i0, 0, n - 4);
  else i0 = std::min<long>(i0, n - 4);
  T acc{};
  for (long k = 0; k < 4; ++k) {
    const double xk = a + (i0 + k) * h_;
    double lk = 1.0;
    for (long m = 0; m < 4; ++m) {
      if (m == k) continue;
      const double xm = a + (i0 + m) * h_;
      lk *= (r - xm) / (xk - xm);
    }
    const long idx = std::abs(i0 + k);
    acc += lk * values[static_cast<std::size_t>(idx)];
  }
  return acc;
}

double RadialGrid::interpolate(std::span<const double> values, double rho) const {
  return interpolate_impl<double>(values, rho);
}

std::complex<double> RadialGrid::interpolate(std::span<const std::complex<double>> values,
                                             double rho) const {
  return interpolate_impl<std::complex<double>>(values, rho);
}

std::function<std::complex<double>(double)> RadialGrid::interpolant(
    std::span<const std::complex<double>> values) const {
  if (values.size() != size()) throw DomainError("field size does not match grid");
  if (kind_ != GridKind::Chebyshev) {
    auto copy = std::make_shared<std::vector<std::complex<double>>>(values.begin(), values.end());
    return [this, copy](double rho) { return interpolate(std::span<const std::complex<double>>(*copy), rho); };
  }
  const std::size_t n = resolution_;
  const std::size_t M = 2 * n;
  auto fre = std::make_shared<std::vector<double>>(M + 1);
  auto fim = std::make_shared<std::vector<double>>(M + 1);
  for (std::size_t k = 0; k <= M; ++k) {
    const std::size_t j = k <= n ? n - k : k - n;
    (*fre)[k] = values[j].real();
    (*fim)[k] = values[j].imag();
  }
  auto node_values = std::make_shared<std::vector<std::complex<double>>>(values.begin(), values.end());
  return [this, fre, fim, node_values, n, M](double rho) -> std::complex<double> {
    const double x = map_rho_to_x(std::abs(rho));
    for (std::size_t j = 0; j <= n; ++j)
      if (x == xs_[j]) return (*node_values)[j];
    const kernels::BarySums s = kernels::active().barycentric(bary_nodes_.data(), bary_weights_.data(),
                                                              fre->data(), fim->data(), x, M + 1);
    return {s.num_re / s.den, s.num_im / s.den};
  };
}

}  // namespace ymflow
