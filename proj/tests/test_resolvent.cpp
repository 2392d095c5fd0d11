#include <doctest.h>

#include <cmath>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"
#include "ymflow/resolvent.hpp"
#include "ymflow/spectrum.hpp"

using namespace ymflow;

namespace {

// Query whose mu = 4 lambda - 3 equals b + i w.
ResolventQuery from_mu(double b, double w) { return ResolventQuery{(b + 3.0) / 4.0, w / 4.0}; }

double max_abs(const ComplexField& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_SUITE("resolvent") {

TEST_CASE("query bookkeeping") {
  const ResolventQuery q{0.25, 3.0};
  CHECK(q.mu() == cplx(-2.0, 12.0));
  CHECK(q.b() == -2.0);
  CHECK(q.omega_tilde() == 12.0);
  for (double a : {-0.24, -0.1, 0.0, 2.0}) CHECK(ResolventQuery{a, 0}.b() > -4.0);
}

TEST_CASE("Liouville-Green phase") {
  for (double w : {1e2, 1e3}) {
    const ResolventQuery q = from_mu(0.0, w);
    CHECK(std::abs(lg_phase(10.0, q)) < 1e-12 * w);
    const double sq = std::sqrt(q.mu()).real();
    double prev = -1.0;
    for (int i = 0; i <= 500; ++i) {
      const double r = 10.0 + 40.0 * i / 500.0;
      const double v = lg_phase(r, q).real() - sq * (r - 10.0);
      CHECK(v >= -1e-9 * w);
      CHECK(v >= prev - 1e-9 * w);
      prev = v;
    }
  }
  for (double b : {-3.5, -3.0, 0.0, 1.0})
    for (double w : {1e2, 1e3, 1e4}) {
      CAPTURE(b);
      CAPTURE(w);
      const ResolventQuery q = from_mu(b, w);
      auto phi = [&](double r) {
        return lg_phase(r, q).real() - r * r / 2 - b / 2 * std::log(std::sqrt(1.0 + r * r / w));
      };
      double prev = phi(3.0);
      bool increasing = true;
      for (int i = 1; i < 500; ++i) {
        const double v = phi(3.0 + 47.0 * i / 499.0);
        increasing = increasing && v >= prev - 1e-9 * std::abs(prev);
        prev = v;
      }
      CHECK(increasing);
      // xi(10) = 0 fixes phi(10) = -50 - (b/2) log<10/sqrt(w)>: bounded uniformly in w
      CHECK(std::abs(phi(10.0)) <= 55.0);
    }
  CHECK_THROWS_AS(lg_phase(2.0, from_mu(0.0, 100.0)), DomainError);
  CHECK_THROWS_AS(lg_phase(5.0, ResolventQuery{0.75, 0.1}), DomainError);
}

TEST_CASE("Liouville-Green potential") {
  for (double w : {1e2, 1e3, 1e4}) {
    const ResolventQuery q = from_mu(0.0, w);
    for (int i = 0; i <= 970; ++i) {
      const double r = 3.0 + 0.1 * i;
      CHECK(std::abs(lg_potential(r, q)) * r * r <= 2.0);
    }
  }
  const ResolventQuery q = from_mu(0.0, 1e6);
  CHECK(std::abs(lg_potential(3.0, q) - 0.5 / q.mu()) < 1e-3 * std::abs(0.5 / q.mu()));
  // holomorphic in mu: d/d(omega) = i d/d(alpha)
  for (double r : {3.5, 8.0, 20.0}) {
    const ResolventQuery c = from_mu(0.5, 300.0);
    const double h = 1e-4;
    const cplx da = (lg_potential(r, {c.alpha + h, c.omega}) - lg_potential(r, {c.alpha - h, c.omega})) / (2 * h);
    const cplx dw = (lg_potential(r, {c.alpha, c.omega + h}) - lg_potential(r, {c.alpha, c.omega - h})) / (2 * h);
    CHECK(std::abs(dw - cplx(0, 1) * da) < 1e-8 * std::abs(da));
  }
}

TEST_CASE("fundamental pair") {
  const GridPtr grid = RadialGrid::uniform(2048, 40);
  CHECK_THROWS_AS(fundamental_pair(ResolventQuery{1.0, 0.0}, grid), SingularityError);

  const FundamentalPair p = fundamental_pair(ResolventQuery{0.5, 0.0}, grid);
  CHECK(p.wronskian_spread < 1e-6);
  CHECK(std::abs(p.wronskian) > 0.0);
}

TEST_CASE("recessive solution follows the WKB amplitude") {
  // r = rho/2; r in [20, 40] needs rho up to 80.
  const GridPtr grid = RadialGrid::uniform(4096, 80);
  const ResolventQuery q{0.0, 50.0};
  const FundamentalPair p = fundamental_pair(q, grid);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double rho = grid->node(i), r = rho / 2;
    if (r < 20.0 || r > 40.0) continue;
    // normal-form solution rho^3 exp(-rho^2/8) u, against the amplitude in log form
    // (exp(-mu xi) itself underflows near r = 40)
    const double logv = std::log(std::abs(p.v_infinity.values[i])) + 3 * std::log(rho) - rho * rho / 8;
    const double logw = -lg_phase(r, q).real() - 0.25 * std::log(std::abs(1.0 + r * r / q.mu()));
    ratio.push_back(logv - logw);
    if (r < 30.0) CHECK(std::log(wkb_amplitude(r, q)) == doctest::Approx(logw).epsilon(1e-12));
  }
  REQUIRE(!ratio.empty());
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  CHECK(std::exp(hi - lo) < 1.1);
}

TEST_CASE("resolvent inverts its operator") {
  const GridPtr grid = RadialGrid::chebyshev(256, 40);
  const ClosedForm g = symmetry_mode();
  // (2 - L) g = g, so R(2) g = g
  const RadialField gf = RadialField::sample(grid, [&](double r) { return g(r); });
  const ResolventSolution s = apply_resolvent(ResolventQuery{2.0, 0.0}, gf);
  double dev = 0.0;
  for (std::size_t i = 0; i < gf.size(); ++i) dev = std::max(dev, std::abs(s.w.values[i] - gf.values[i]));
  CHECK(dev / sup_norm(gf) < 1e-6);

  const ResolventSolution e = apply_resolvent(ResolventQuery{0.3, 7.0},
                                              RadialField::sample(grid, [](double r) { return std::exp(-r * r); }));
  CHECK(std::abs(e.w.values.back()) < 1e-6 * max_abs(e.w));

  const ResolventSolution z = apply_resolvent(ResolventQuery{0.3, 7.0}, RadialField::zeros(grid));
  CHECK(max_abs(z.w) == 0.0);

  // off the spectrum on the real axis the resolvent is finite
  const ResolventSolution h = apply_resolvent(ResolventQuery{0.5, 0.0}, default_probes(grid)[0]);
  CHECK(std::isfinite(norm_H(h.w)));
}

TEST_CASE("residual on random probes") {
  const GridPtr grid = RadialGrid::chebyshev(256, 40);
  const auto probes = random_corpus(grid, 20, 5);
  for (const ResolventQuery q : {ResolventQuery{0.0, 10.0}, ResolventQuery{0.2, -3.0}}) {
    for (const auto& f : probes) CHECK(apply_resolvent(q, f).residual < 1e-6);
  }
}

TEST_CASE("conjugation symmetry") {
  const GridPtr grid = RadialGrid::chebyshev(128, 40);
  const RadialField f = random_corpus(grid, 1, 77)[0];
  const ResolventSolution a = apply_resolvent(ResolventQuery{0.1, 5.0}, f);
  const ResolventSolution b = apply_resolvent(ResolventQuery{0.1, -5.0}, f);
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(a.w.values[i] - std::conj(b.w.values[i])));
  CHECK(d < 1e-10 * max_abs(a.w));
}

TEST_CASE("agrees with the collocation matrix on the real axis") {
  const GridPtr grid = RadialGrid::chebyshev(256, 40);
  const Eigen::MatrixXd L = collocation_operator_dirichlet(*grid);
  const Eigen::Index m = L.rows();
  const RadialField f = RadialField::sample(grid, [](double r) { return std::exp(-r * r / 2) * (1 + r * r); });
  for (double lam : {-0.01, 0.3, 0.9, 1.5, 2.5}) {
    CAPTURE(lam);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) rhs[i] = f.values[i];
    const Eigen::VectorXd w = (lam * Eigen::MatrixXd::Identity(m, m) - L).partialPivLu().solve(rhs);
    const ResolventSolution s = apply_resolvent(ResolventQuery{lam, 0.0}, f);
    double num = 0.0, den = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (grid->node(i) > 20.0) continue;
      num = std::max(num, std::abs(s.w.values[i] - w[i]));
      den = std::max(den, std::abs(w[i]));
    }
    CHECK(num / den < 1e-4);
  }
}

TEST_CASE("bound scan") {
  const GridPtr grid = RadialGrid::chebyshev(256, 40);
  const auto probes = default_probes(grid);
  CHECK(probes.size() == 8);
  for (const auto& p : probes) CHECK(norm_H(p) == doctest::Approx(1.0).epsilon(1e-12));
  const ScanSummary s = resolvent_bound_scan(0.0, {2, 5, 10, 20, 50, 100}, probes);
  CHECK(s.rows.size() == 48);
  for (const auto& r : s.rows) CHECK(r.status == "ok");
  CHECK(s.slope <= 0.05);
  CHECK(s.max_residual < 1e-6);
  CHECK(s.max_ratio.size() == 6);

  const ScanSummary e = resolvent_bound_scan(0.0, {2, 5}, {});
  CHECK(e.rows.empty());
}

}
