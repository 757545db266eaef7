#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uclab/error.hpp"
#include "uclab/frequency.hpp"

using namespace uclab;

namespace {

const double kPi = std::numbers::pi;
const double kLn2 = std::numbers::ln2;

// Gauss-Legendre in radius and angle over the upper half disc; exact for
// the polynomial integrands used below.
double polar_half_disc(const Field& f, double r) {
  std::vector<double> x, w;
  gauss_legendre(24, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double rho = 0.5 * r * (x[i] + 1.0);
      const double th = 0.5 * kPi * (x[j] + 1.0);
      s += w[i] * w[j] * f({rho * std::cos(th), rho * std::sin(th), 0.0}) * rho;
    }
  return s * 0.5 * r * 0.5 * kPi;
}

MatrixField scalar_affine(double slope) {
  std::array<Mat, 3> s{Mat(2), Mat(2), Mat(2)};
  s[0] = slope * Mat::identity(2);
  return MatrixField::affine(Mat::identity(2), s, 1.5);
}

AnalyticSolution im(int k) { return analytic_library("halfplane_harmonic", {static_cast<double>(k)}); }

}  // namespace

TEST_CASE("weight mu") {
  const MatrixField c = MatrixField::constant(Mat::diagonal(2, {3.0, 0.5, 0.0}));
  CHECK(weight_mu(c, {0.1, 0.2, 0}, {0.4, -0.3, 0}) == doctest::Approx(1.0));
  CHECK(weight_mu(MatrixField::identity(2), {}, {0.4, 0.3, 0}) == 1.0);
  // A = (1 + 0.1 x1) I with A(0) = I gives mu(0, y) = 1 + 0.1 y1.
  const MatrixField a = scalar_affine(0.1);
  for (const Vec& y : {Vec{0.3, 0.2, 0}, Vec{-0.5, 0.1, 0}, Vec{0.0, 0.7, 0}})
    CHECK(weight_mu(a, {}, y) == doctest::Approx(1.0 + 0.1 * y[0]));
  CHECK_THROWS_AS(weight_mu(a, {0.1, 0.1, 0}, {0.1, 0.1, 0}), UndefinedPointError);
}

TEST_CASE("mu stays within the ellipticity band") {
  Mat waves(2);
  waves(0, 0) = 4.0;
  waves(1, 1) = 3.0;
  const MatrixField a = MatrixField::modulated(Mat::identity(2), {0.4, 0.3, 0.0}, waves);
  const double lam = a.ellipticity();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const Vec x0{u(rng), u(rng), 0}, y{u(rng), u(rng), 0};
    const double m = weight_mu(a, x0, y);
    CHECK(m >= 1.0 / (lam * lam) - 1e-12);
    CHECK(m <= lam * lam + 1e-12);
  }
}

TEST_CASE("ellipsoid F") {
  const Ellipsoid b = ellipsoid_F(MatrixField::identity(2), {0.1, 0.2, 0}, 0.5);
  CHECK(b.contains({0.1, 0.69, 0}));
  CHECK_FALSE(b.contains({0.1, 0.71, 0}));
  const Ellipsoid e = ellipsoid_F(MatrixField::constant(Mat::diagonal(2, {4.0, 1.0, 0.0})), {}, 0.5);
  CHECK(e.contains({0.99, 0.0, 0}));
  CHECK_FALSE(e.contains({1.01, 0.0, 0}));
  CHECK(e.contains({0.0, 0.49, 0}));
  CHECK_FALSE(e.contains({0.0, 0.51, 0}));
  CHECK(e.half_extent()[0] == doctest::Approx(1.0));
  CHECK(e.half_extent()[1] == doctest::Approx(0.5));

  // B(x0, r / sqrt(Lambda)) inside F inside B(x0, sqrt(Lambda) r).
  const MatrixField a = MatrixField::constant(Mat::diagonal(2, {4.0, 0.25, 0.0}));
  const double lam = 4.0, r = 0.3;
  const Ellipsoid f = ellipsoid_F(a, {}, r);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const Vec y{u(rng), u(rng), 0};
    if (norm(y) < r / std::sqrt(lam)) CHECK(f.contains(y));
    if (f.contains(y)) CHECK(norm(y) < std::sqrt(lam) * r);
  }
}

TEST_CASE("J of the linear solution is pi/8 at radius one") {
  const double oracle = polar_half_disc([](const Vec& x) { return x[1] * x[1]; }, 1.0);
  CHECK(oracle == doctest::Approx(kPi / 8.0).epsilon(1e-12));
  const WeightedMass m = J(im(1).u, MatrixField::identity(2), GraphDomain::halfplane(2), {}, 1.0);
  CHECK(m.value == doctest::Approx(oracle).epsilon(1e-3));
  CHECK(m.cells > 0);
  CHECK(std::abs(m.value - oracle) <= 4.0 * m.error + 1e-12);
}

TEST_CASE("J of zero is zero and the doubling index is degenerate") {
  auto zero = [](const Vec&) { return 0.0; };
  CHECK(J(zero, MatrixField::identity(2), GraphDomain::halfplane(2), {}, 0.5).value == 0.0);
  CHECK_THROWS_AS(doubling_index(zero, MatrixField::identity(2), GraphDomain::halfplane(2), {}, 0.2),
                  DegenerateMassError);
}

TEST_CASE("quadrature consistency under refinement") {
  const AnalyticSolution u = im(2);
  MassOptions coarse;
  coarse.cells_per_radius = 24;
  MassOptions fine;
  fine.cells_per_radius = 48;
  const GraphDomain w = GraphDomain::wedge(2, 2.0);
  const WeightedMass a = J(u.u, MatrixField::identity(2), w, {0.05, 0.3, 0}, 0.2, coarse);
  const WeightedMass b = J(u.u, MatrixField::identity(2), w, {0.05, 0.3, 0}, 0.2, fine);
  CHECK(std::abs(a.value - b.value) <= 4.0 * a.error + 1e-15);
}

TEST_CASE("homogeneous doubling indices") {
  const MatrixField id = MatrixField::identity(2);
  const GraphDomain hp = GraphDomain::halfplane(2);
  for (int k = 1; k <= 3; ++k)
    for (double r : {0.05, 0.1, 0.2})
      CHECK(doubling_index(im(k).u, id, hp, {}, r) == doctest::Approx((2 * k + 2) * kLn2).epsilon(0.01));
  const AnalyticSolution w = analytic_library("wedge_harmonic", {kPi / 2.0});
  CHECK(doubling_index(w.u, id, GraphDomain::wedge(2, kPi / 2.0), {}, 0.1) == doctest::Approx(6 * kLn2).epsilon(0.01));
  // Three dimensions: Im((x1 + i x3)^k) gives 2k + 3.
  const AnalyticSolution u3 = analytic_library("halfplane_harmonic", {1, 3});
  CHECK(doubling_index(u3.u, MatrixField::identity(3), GraphDomain::halfplane(3), {}, 0.2) ==
        doctest::Approx(5 * kLn2).epsilon(0.02));
}

TEST_CASE("doubling index from a grid solution") {
  const AnalyticSolution u = im(1);
  const GraphDomain hp = GraphDomain::halfplane(2);
  const GridSolution s = solve(hp, MatrixField::identity(2), Ball{{}, 1.0}, u.u, 1.0 / 128.0);
  CHECK(doubling_index(s, MatrixField::identity(2), hp, {}, 0.2) == doctest::Approx(4 * kLn2).epsilon(0.05));
  // Radius 0.6 doubles outside the solved ball.
  CHECK_THROWS_AS(doubling_index(s, MatrixField::identity(2), hp, {}, 0.6), OutOfRangeError);
}

TEST_CASE("affine invariance of J") {
  const MatrixField a = MatrixField::constant(Mat::diagonal(2, {4.0, 1.0, 0.0}));
  const AnalyticSolution u = analytic_library("constant_coefficient_affine_image", {2, 2.0, 0.0, 1.0});
  const GraphDomain hp = GraphDomain::halfplane(2);
  for (double r : {0.05, 0.1, 0.2}) {
    const Vec x0{0.1, 0.0, 0.0};
    const double direct = J(u.u, a, hp, x0, r).value;
    const double normalized = J_normalized(normalize(a, hp, u.u, u.grad, x0), r).value;
    CHECK(direct == doctest::Approx(normalized).epsilon(1e-2));
  }
}

TEST_CASE("frequency of homogeneous solutions") {
  const std::vector<double> grid = geometric_grid(0.05, 0.2);
  CHECK(grid.size() == 9);
  CHECK(grid[4] == doctest::Approx(0.1));
  const GraphDomain hp = GraphDomain::halfplane(2);
  for (int k = 1; k <= 3; ++k) {
    const FrequencyCurves c = frequency(normalize(MatrixField::identity(2), hp, im(k).u, im(k).grad, {}), grid);
    for (double n : c.N) CHECK(n == doctest::Approx(k).epsilon(0.03));
    // The log derivative identity H'/H = (d-1)/r + 2N/r holds for gamma = 0.
    CHECK(check_H_logderivative(c, 0.0).max_defect <= 0.05);
  }
  const double theta = 3.0 * kPi / 4.0;
  const AnalyticSolution w = analytic_library("wedge_harmonic", {theta});
  const FrequencyCurves c = frequency(normalize(MatrixField::identity(2), GraphDomain::wedge(2, theta), w.u, w.grad, {}), grid);
  for (double n : c.N) CHECK(n == doctest::Approx(4.0 / 3.0).epsilon(0.03));
}

TEST_CASE("frequency is nondecreasing for a nonhomogeneous solution") {
  const AnalyticSolution u = combine(im(1), 1.0, im(2), 2.0);
  const FrequencyCurves c =
      frequency(normalize(MatrixField::identity(2), GraphDomain::halfplane(2), u.u, u.grad, {}), geometric_grid(0.05, 0.4));
  for (std::size_t i = 1; i < c.N.size(); ++i) CHECK(c.N[i] >= c.N[i - 1] - 1e-3);
  CHECK(c.N.front() > 1.0);
  CHECK(c.N.back() < 2.0);
}

TEST_CASE("three-ball inequality") {
  const MassFunction m = mass_function(im(1).u, MatrixField::identity(2), GraphDomain::halfplane(2));
  const ThreeBallReport dyadic = check_three_ball(m, 2, {}, 0.05, 0.1, 0.2, 0.0, 0.0);
  CHECK(dyadic.beta == 1.0);
  CHECK(dyadic.margin == doctest::Approx(0.0).epsilon(1e-6));
  // With J proportional to r^(2k+d) both sides agree for any radii.
  const ThreeBallReport skew = check_three_ball(m, 2, {}, 0.03, 0.1, 0.25, 0.0, 0.0);
  CHECK(skew.beta == doctest::Approx(std::log(0.1 / 0.03) / std::log(0.25 / 0.1)));
  CHECK(skew.lhs == doctest::Approx(skew.rhs).epsilon(1e-4));
}

TEST_CASE("almost monotonicity, shift and boundary doubling") {
  const MatrixField id = MatrixField::identity(2);
  const GraphDomain hp = GraphDomain::halfplane(2);
  const std::vector<double> grid = geometric_grid(0.05, 0.2);
  StarshapeGuard guard;
  guard.domain = &hp;
  guard.a = &id;
  for (int k = 1; k <= 2; ++k) {
    const MassFunction m = mass_function(im(k).u, id, hp);
    const EmpiricalConstant mono = check_almost_monotonicity(m, {}, grid, 0.0, 0.02, guard);
    CHECK(mono.pass);
    CHECK(mono.c_emp == 0.0);
    const EmpiricalConstant same = check_shift(m, {}, {}, 0.1, 0.0);
    CHECK(same.pass);
    CHECK(check_boundary_doubling(m, hp, {}, grid, 0.0).c_emp == 0.0);
  }
  const MassFunction m1 = mass_function(im(1).u, id, hp);
  const EmpiricalConstant shifted = check_shift(m1, {0.0, 0.0, 0}, {0.01, 0.01, 0}, 0.5, 0.0);
  CHECK(std::isfinite(shifted.c_emp));
  CHECK_THROWS_AS(check_shift(m1, {}, {0.3, 0.3, 0}, 0.5, 0.0), PreconditionError);

  const AnalyticSolution w = analytic_library("wedge_harmonic", {kPi / 2.0});
  const GraphDomain wd = GraphDomain::wedge(2, kPi / 2.0);
  CHECK(check_boundary_doubling(mass_function(w.u, id, wd), wd, {}, grid, 0.0).c_emp == 0.0);
}

TEST_CASE("variable coefficients give a finite monotonicity constant") {
  const MatrixField a = scalar_affine(0.1);
  const GraphDomain hp = GraphDomain::halfplane(2);
  const GridSolution s = solve(hp, a, Ball{{}, 1.0}, im(2).u, 1.0 / 128.0);
  const EmpiricalConstant c = check_almost_monotonicity(mass_function(s, a, hp), {}, geometric_grid(0.05, 0.2), 0.1);
  CHECK(std::isfinite(c.c_emp));
  CHECK(c.c_emp >= 0.0);
}

TEST_CASE("starshape precondition failure carries a witness") {
  const GraphDomain saw = GraphDomain::sawtooth(2, 1.0, 1, SawtoothProfile::Scallop);
  const MatrixField id = MatrixField::identity(2);
  StarshapeGuard guard;
  guard.domain = &saw;
  guard.a = &id;
  const Vec x0 = saw.lift({0.25, 0, 0}) + Vec{0.0, 1e-4, 0.0};
  const MassFunction m = mass_function(im(1).u, id, saw);
  try {
    check_almost_monotonicity(m, x0, {0.02, 0.04}, 0.0, 0.02, guard);
    FAIL("expected a precondition error");
  } catch (const PreconditionError& e) {
    CHECK(std::abs(saw.gap(e.witness())) <= 1e-12);
  }
}
