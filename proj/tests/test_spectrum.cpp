#include <doctest.h>

#include <cmath>

#include "ymflow/closed_forms.hpp"
#include "ymflow/errors.hpp"
#include "ymflow/ode.hpp"
#include "ymflow/spectrum.hpp"

using namespace ymflow;

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return std::abs(ab) / std::sqrt(aa * bb);
}

std::vector<double> real_part(const ComplexField& f) {
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f.values[i].real();
  return v;
}

const Window kStrip{-1.0 / 75.0 + 1e-3, 3.0, -2.0, 2.0};

}  // namespace

TEST_SUITE("spectrum") {

TEST_CASE("potential Taylor coefficients match the closed form") {
  const auto c = potential_taylor(8);
  for (double r : {0.05, 0.1, 0.2}) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += c[k] * std::pow(r, 2.0 * k);
    CHECK(s == doctest::Approx(potential_v(r)).epsilon(1e-10));
  }
}

TEST_CASE("Frobenius launch") {
  const ClosedForm g = symmetry_mode();
  const FrobeniusLaunch f = frobenius_launch(1.0, 0.25, 24);
  CHECK(f.rho0 == 0.25);
  CHECK(std::abs(f.u - g(0.25) / g(0.0)) < 1e-10);
  CHECK(std::abs(f.du - g.deriv1(0.25) / g(0.0)) < 1e-10);

  const FrobeniusLaunch z = frobenius_launch(cplx(0.3, 1.7), 1e-3, 12);
  CHECK(std::abs(z.u - 1.0) < 1e-5);
  CHECK(std::abs(z.du) < 1e-2);

  // V has poles at rho^2 = 36/sqrt(6) - 14 < 0, so the series in rho^2 converges
  // geometrically with ratio (0.25/0.835)^2 ~ 0.09: six terms leave ~1e-7,
  // ten leave ~1e-10.
  const FrobeniusLaunch a = frobenius_launch(0.5, 0.25, 6), b = frobenius_launch(0.5, 0.25, 12);
  const FrobeniusLaunch c = frobenius_launch(0.5, 0.25, 10), d = frobenius_launch(0.5, 0.25, 20);
  CHECK(std::abs(a.u - b.u) < 1e-6);
  CHECK(std::abs(c.u - d.u) < 1e-9);
  CHECK_THROWS_AS(frobenius_launch(1.0, 5.0, 24), DomainError);
}

TEST_CASE("second Frobenius branch blows up like rho^-5") {
  // generic data at rho = 1 integrated towards the origin
  const double lam = 0.4;
  auto rhs = [&](const CState<2>& y, CState<2>& dy, double r) {
    dy[0] = y[1];
    dy[1] = -(6.0 / r - r / 2) * y[1] - (potential_v(r) - 1 - lam) * y[0];
  };
  const std::vector<double> stops{1e-2, 1e-3};
  const auto tr = integrate_stops<2>(rhs, CState<2>{1.0, 0.0}, 1.0, 1e-3, stops);
  const double slope = std::log(std::abs(tr.y[1][0]) / std::abs(tr.y[0][0])) / std::log(1e-3 / 1e-2);
  CHECK(slope == doctest::Approx(-5.0).epsilon(0.02));
}

TEST_CASE("shooting functional") {
  const GridPtr grid = RadialGrid::uniform(2048, 40);
  const double at1 = std::abs(shoot_matching(1.0, *grid));
  const double at2 = std::abs(shoot_matching(2.0, *grid));
  CHECK(at1 < 1e-6 * std::max(1.0, at2));
  CHECK(at2 > 1e-3);

  const AssembledMode m = assemble_eigenfunction(1.0, grid);
  const ClosedForm g = symmetry_mode();
  double dev = 0.0;
  for (std::size_t i = 0; i < grid->size() && grid->node(i) <= 10.0; ++i)
    dev = std::max(dev, std::abs(m.u.values[i].real() - g(grid->node(i)) / g(0.0)) / (g(grid->node(i)) / g(0.0)));
  CHECK(dev < 1e-6);
}

TEST_CASE("eigenvalue search") {
  const GridPtr grid = RadialGrid::uniform(2048, 40);
  const SpectralResult r = find_eigenvalues(kStrip, grid);
  REQUIRE(r.eigenvalues.size() == 1);
  CHECK(std::abs(r.eigenvalues[0].lambda - 1.0) < 1e-6);
  CHECK(r.eigenvalues[0].method == "shooting");

  CHECK(find_eigenvalues(Window{2, 5, -2, 2}, grid).eigenvalues.empty());
  CHECK(find_eigenvalues(Window{0, 0, -1, 1}, grid).eigenvalues.empty());
  CHECK(count_zeros(kStrip, 40.0) == 1);
}

TEST_CASE("collocation spectrum") {
  const GridPtr g256 = RadialGrid::chebyshev(256, 40), g512 = RadialGrid::chebyshev(512, 40);
  const SpectralResult d = collocation_spectrum(g256, 16, FarField::Dirichlet, -1.0);
  const SpectralResult rb = collocation_spectrum(g256, 16, FarField::Robin, -1.0);
  REQUIRE(d.eigenvalues.size() >= 2);
  CHECK(std::abs(d.eigenvalues[0].lambda - 1.0) < 1e-4);
  for (std::size_t k = 1; k < d.eigenvalues.size(); ++k) CHECK(d.eigenvalues[k].lambda.real() < -1.0 / 75.0 + 5e-3);
  CHECK(std::abs(d.eigenvalues[0].lambda - rb.eigenvalues[0].lambda) < 1e-4);
  CHECK(std::abs(d.eigenvalues[1].lambda - rb.eigenvalues[1].lambda) < 1e-4);

  const ClosedForm gm = symmetry_mode();
  REQUIRE(d.eigenvalues[0].eigenfunction);
  std::vector<double> gs;
  for (double r : g256->nodes()) gs.push_back(gm(r));
  CHECK(cosine(real_part(*d.eigenvalues[0].eigenfunction), gs) > 1 - 1e-6);

  // refinement
  const SpectralResult d2 = collocation_spectrum(g512, 16, FarField::Dirichlet, -1.0);
  CHECK(std::abs(d2.eigenvalues[0].lambda - d.eigenvalues[0].lambda) < 1e-6);
  CHECK(std::abs(d2.eigenvalues[1].lambda.real() - d.eigenvalues[1].lambda.real()) < 1e-3);

  // shooting and collocation agree
  const SpectralResult s = find_eigenvalues(kStrip, RadialGrid::uniform(2048, 40));
  CHECK(std::abs(s.eigenvalues[0].lambda - d.eigenvalues[0].lambda) < 1e-4);
}

TEST_CASE("SUSY transform") {
  const GridPtr grid = RadialGrid::chebyshev(128, 30);
  const ClosedForm g = symmetry_mode();
  const RadialField u = RadialField::sample(grid, [&](double r) { return g(r); });
  const RadialField back = susy_inverse(susy_transform(u));
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(std::abs(back.values[i] - u.values[i]) < 1e-12);
  const RadialField z = susy_transform(RadialField::zeros(grid));
  for (double v : z.values) CHECK(v == 0.0);

  // one-sided stencils at rho = 0.2 dominate; 16000 intervals put them below 1e-8
  const GridPtr ig = RadialGrid::interval(0.2, 10, 16000);
  const RadialField v = RadialField::sample(ig, [&](double r) { return r * r * r * std::exp(-r * r / 8) * g(r); });
  const RadialField res = normal_form_residual(v, 1.0);
  CHECK(sup_norm(res) / sup_norm(v) < 1e-8);
}

TEST_CASE("factorisation") {
  const GridPtr ig = RadialGrid::interval(0.2, 10, 8000);
  const ClosedForm g = symmetry_mode();
  const RadialField v = RadialField::sample(ig, [&](double r) { return r * r * r * std::exp(-r * r / 8) * g(r); });
  const RadialField Bv = factorization_ops(v).first;
  CHECK(sup_norm(Bv) / sup_norm(v) < 1e-8);

  // (lambda + B+B - 1) v is the normal-form residual; at lambda = 1 both vanish
  const RadialField bpb = factorization_ops(Bv).second;
  const RadialField nf = normal_form_residual(v, 1.0);
  for (std::size_t i = 10; i + 10 < v.size(); i += 97) CHECK(std::abs(bpb.values[i] - nf.values[i]) < 1e-6);

  const auto [z1, z2] = factorization_ops(RadialField::zeros(ig));
  CHECK(sup_norm(z1) == 0.0);
  CHECK(sup_norm(z2) == 0.0);
  CHECK_THROWS_AS(factorization_ops(RadialField::zeros(RadialGrid::uniform(100, 10))), DomainError);
}

TEST_CASE("shooting eigenfunction is annihilated by B") {
  const GridPtr grid = RadialGrid::uniform(4000, 10);
  const AssembledMode m = assemble_eigenfunction(1.0, grid);
  const GridPtr ig = RadialGrid::interval(0.2, 10, 4000 - 80);
  RadialField u = RadialField::zeros(ig);
  for (std::size_t i = 0; i < ig->size(); ++i) u.values[i] = m.u.values[i + 80].real();
  const RadialField v = susy_transform(u);
  CHECK(sup_norm(factorization_ops(v).first) / sup_norm(u) < 1e-6);
}

TEST_CASE("partner operator floor") {
  const SusyBound b = susy_ground_bound(RadialGrid::interval(0.02, 40, 4000));
  CHECK(b.rayleigh_min >= 1.0 / 75.0 - 1e-4);
  CHECK(b.symmetry_defect < 1e-10);
  CHECK(b.lowest.size() >= 2);
  for (std::size_t k = 1; k < b.lowest.size(); ++k) CHECK(b.lowest[k] >= b.lowest[k - 1]);

  // quadratic form identity (Av|v) = int |v'|^2 + q |v|^2 on a compactly supported v
  const GridPtr ig = RadialGrid::interval(0.5, 12, 1500);
  const Eigen::MatrixXd A = susy_matrix(*ig);
  Eigen::VectorXd v(ig->size());
  double form = 0.0;
  const double h = ig->spacing();
  auto bump = [](double r) { return std::pow(std::sin(M_PI * (r - 1) / 9), 4) * (r > 1 && r < 10); };
  auto dbump = [](double r) {
    const double s = std::sin(M_PI * (r - 1) / 9);
    return (r > 1 && r < 10) ? 4 * s * s * s * std::cos(M_PI * (r - 1) / 9) * M_PI / 9 : 0.0;
  };
  for (std::size_t i = 0; i < ig->size(); ++i) {
    const double r = ig->node(i);
    v[i] = bump(r);
    form += h * (dbump(r) * dbump(r) + susy_potential(r) * v[i] * v[i]);
  }
  CHECK(h * v.dot(A * v) == doctest::Approx(form).epsilon(1e-5));

  // no collocation eigenvalue lies in (-1/75, 1), so the cross-check is vacuous
  const SpectralResult d = collocation_spectrum(RadialGrid::chebyshev(256, 40), 16);
  for (std::size_t k = 1; k < d.eigenvalues.size(); ++k) {
    CHECK(d.eigenvalues[k].lambda.real() < -1.0 / 75.0);
    CHECK(1.0 - d.eigenvalues[k].lambda.real() >= b.rayleigh_min);
  }
}

TEST_CASE("Riesz projection onto the unstable mode") {
  const GridPtr grid = RadialGrid::chebyshev(128, 40);
  const SpectralProjection P = spectral_projection(grid);
  CHECK(P.rank == 1);
  CHECK(P.idempotency_defect < 1e-8);
  const Eigen::MatrixXcd P2 = P.P * P.P;
  CHECK((P2 - P.P).norm() / P.P.norm() < 1e-8);

  const ClosedForm g = symmetry_mode();
  const Eigen::Index m = P.P.rows();
  Eigen::VectorXcd gv(m);
  for (Eigen::Index i = 0; i < m; ++i) gv[i] = g(grid->node(i));
  CHECK((P.P * gv - gv).norm() / gv.norm() < 1e-6);
  std::vector<double> gs(grid->size());
  for (std::size_t i = 0; i < gs.size(); ++i) gs[i] = g(grid->node(i));
  CHECK(P.g_coefficient(gs) == doctest::Approx(1.0).epsilon(1e-6));
}

}
