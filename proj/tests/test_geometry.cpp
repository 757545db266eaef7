#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "uclab/coefficients.hpp"
#include "uclab/error.hpp"
#include "uclab/geometry.hpp"

using namespace uclab;

namespace {

const double kPi = std::numbers::pi;

GraphDomain quarter_wedge() { return GraphDomain::wedge(2, kPi / 2.0); }

}  // namespace

TEST_CASE("modulus kinds") {
  const Modulus z = Modulus::zero();
  CHECK(z(0.3) == 0.0);
  CHECK(z.valid());
  const Modulus p = Modulus::power(2.0, 0.5);
  CHECK(p(0.25) == doctest::Approx(1.0));
  CHECK(p.valid());
  const Modulus t = Modulus::tabulated({0.0, 0.5, 1.0}, {0.0, 0.1, 0.4});
  CHECK(t(0.25) == doctest::Approx(0.05));
  CHECK(t(0.75) == doctest::Approx(0.25));
  CHECK(t.valid());
  CHECK_FALSE(Modulus::tabulated({0.0, 0.5, 1.0}, {0.0, 0.3, 0.1}).valid());
  CHECK_FALSE(Modulus::tabulated({0.0, 0.5, 1.0}, {0.2, 0.3, 0.4}).valid());
}

TEST_CASE("built-in graphs are Lipschitz with the declared constant") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const GraphDomain& g : {GraphDomain::halfplane(2), quarter_wedge(), GraphDomain::wedge(2, 2.0),
                               GraphDomain::sawtooth(2, 0.5, 6, SawtoothProfile::Scallop),
                               GraphDomain::sawtooth(2, 0.5, 6, SawtoothProfile::Triangle)}) {
    double worst = 0.0;
    for (int i = 0; i < 5000; ++i) {
      const Vec a{u(rng), 0.0, 0.0}, b{u(rng), 0.0, 0.0};
      worst = std::max(worst, std::abs(g.phi(a) - g.phi(b)) / std::max(std::abs(a[0] - b[0]), 1e-300));
    }
    CHECK(worst <= g.lipschitz() * (1.0 + 1e-9));
  }
}

TEST_CASE("wedge graph is cot(theta/2)|x'|") {
  const GraphDomain w = GraphDomain::wedge(2, 2.0);
  const double c = 1.0 / std::tan(1.0);
  CHECK(w.phi({0.3, 0.0, 0.0}) == doctest::Approx(0.3 * c));
  CHECK(w.phi({-0.3, 0.0, 0.0}) == doctest::Approx(0.3 * c));
  CHECK(w.lipschitz() == doctest::Approx(c));
  const GraphDomain w3 = GraphDomain::wedge(3, kPi / 2.0);
  CHECK(w3.phi({0.3, 0.4, 0.0}) == doctest::Approx(0.5));
}

TEST_CASE("boundary normals are unit and point down") {
  const GraphDomain s = GraphDomain::sawtooth(2, 0.5, 4, SawtoothProfile::Scallop);
  for (double t = -0.9; t < 0.9; t += 0.0137) {
    const BoundaryPoint b = s.boundary_point({t, 0.0, 0.0});
    if (!b.has_normal) continue;
    CHECK(norm(b.normal) == doctest::Approx(1.0));
    CHECK(b.normal[1] < 0.0);
    CHECK(b.weight == doctest::Approx(std::sqrt(1.0 + s.grad_phi({t, 0, 0})[0] * s.grad_phi({t, 0, 0})[0])));
  }
  // The origin is a kink of every level.
  CHECK_FALSE(s.boundary_point({0.0, 0.0, 0.0}).has_normal);
  CHECK_FALSE(quarter_wedge().boundary_point({0.0, 0.0, 0.0}).has_normal);
}

TEST_CASE("quasiconvexity on convex domains passes exactly") {
  const QuasiconvexityReport h = quasiconvexity_check(GraphDomain::halfplane(2), 64);
  CHECK(h.pass);
  CHECK(h.worst_violation <= 0.0);
  CHECK(quasiconvexity_check(quarter_wedge(), 64).pass);
  CHECK(quasiconvexity_check(GraphDomain::halfplane(3), 16, 9).pass);
  CHECK(quasiconvexity_check(GraphDomain::wedge(3, kPi / 2.0), 16, 9).pass);
}

TEST_CASE("scallop sawtooth needs a nonzero modulus") {
  // Each scallop level has second derivative -2a, so six levels of a = 0.5
  // dip by at most 3 rho^2 below a tangent, which 4 rho^2 dominates.
  const GraphDomain flat = GraphDomain::sawtooth(2, 0.5, 6, SawtoothProfile::Scallop);
  const QuasiconvexityReport bad = quasiconvexity_check(flat, 200);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_violation > 0.0);
  const GraphDomain ok = GraphDomain::sawtooth(2, 0.5, 6, SawtoothProfile::Scallop, Modulus::power(4.0, 1.0));
  const QuasiconvexityReport good = quasiconvexity_check(ok, 10000, 33);
  CHECK(good.samples >= 10000);
  CHECK(good.pass);
}

TEST_CASE("halfspace check") {
  const HalfspaceReport h = halfspace_check(GraphDomain::halfplane(2), {0.2, 0, 0}, 0.5);
  CHECK(h.pass);
  CHECK(h.excess == doctest::Approx(0.0));
  CHECK(h.normal[1] == doctest::Approx(-1.0));
  CHECK(halfspace_check(quarter_wedge(), {0.0, 0, 0}, 0.5).pass);
  // At the top of a scallop the boundary falls away below the tangent line.
  const GraphDomain s = GraphDomain::sawtooth(2, 1.0, 1, SawtoothProfile::Scallop);
  const HalfspaceReport top = halfspace_check(s, {0.25, 0, 0}, 0.2);
  CHECK_FALSE(top.pass);
  CHECK(top.excess > 0.0);
}

TEST_CASE("starshape check") {
  const MatrixField id = MatrixField::identity(2);
  const StarshapeReport h = starshape_check(GraphDomain::halfplane(2), id, {0.1, 0.3, 0}, 0.5, 400);
  CHECK(h.pass);
  CHECK(h.min_value == doctest::Approx(0.3));
  for (const Vec& x0 : {Vec{0.0, 0.2, 0}, Vec{0.1, 0.5, 0}, Vec{-0.2, 0.3, 0}})
    CHECK(starshape_check(quarter_wedge(), id, x0, 0.6, 400, 0.0).pass);
  // Just above a scallop crest the nearby boundary curves away from the centre.
  const GraphDomain s = GraphDomain::sawtooth(2, 1.0, 1, SawtoothProfile::Scallop);
  const Vec crest = s.lift({0.25, 0, 0});
  const StarshapeReport bad = starshape_check(s, id, crest + Vec{0.0, 1e-4, 0.0}, 0.2, 400);
  CHECK_FALSE(bad.pass);
  CHECK_THROWS_AS(starshape_check(GraphDomain::halfplane(2), id, {0.0, -0.1, 0}, 0.5, 64), DomainError);
}

TEST_CASE("starshape sufficiency") {
  const GraphDomain w = GraphDomain::wedge(2, kPi / 2.0, Modulus::power(1.0, 1.0));
  CHECK(starshape_sufficiency(w, MatrixField::identity(2), 1e6, 4.0, 2.0));

  MatrixField a = MatrixField::identity(2);
  a.declare(1.0, 1.0);
  // With omega(rho) = rho, L = 1: 16 l + q^2 l <= 1/4 where q = 2 sqrt 2 + 4.
  const double q = 2.0 * std::sqrt(2.0) + 4.0;
  const double root = 0.25 / (16.0 + q * q);
  CHECK(root == doctest::Approx(0.0039919).epsilon(1e-4));
  CHECK(starshape_sufficiency(w, a, root * (1.0 - 1e-9), 4.0, 2.0));
  CHECK_FALSE(starshape_sufficiency(w, a, root * (1.0 + 1e-9), 4.0, 2.0));

  // Zero modulus reduces to S^2 l <= 1/(gamma Lambda (1+L^2) T).
  const GraphDomain hp = GraphDomain::halfplane(2);
  CHECK(starshape_sufficiency(hp, a, 0.5 / 16.0 * (1 - 1e-9), 4.0, 2.0));
  CHECK_FALSE(starshape_sufficiency(hp, a, 0.5 / 16.0 * (1 + 1e-9), 4.0, 2.0));
}

TEST_CASE("starshape sufficiency is antitone in every argument") {
  const GraphDomain w = GraphDomain::wedge(2, kPi / 2.0, Modulus::power(1.0, 1.0));
  MatrixField a = MatrixField::identity(2);
  a.declare(1.0, 1.0);
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
  auto antitone = [&](auto f) {
    bool seen_false = false;
    for (double v : grid) {
      const bool r = f(v);
      if (seen_false) CHECK_FALSE(r);
      seen_false = seen_false || !r;
    }
  };
  antitone([&](double s) { return starshape_sufficiency(w, a, 0.002, s, 2.0); });
  antitone([&](double t) { return starshape_sufficiency(w, a, 0.002, 4.0, t); });
  antitone([&](double l) { return starshape_sufficiency(w, a, 0.001 * l, 4.0, 2.0); });
  antitone([&](double g) {
    MatrixField b = MatrixField::identity(2);
    b.declare(1.0, g);
    return starshape_sufficiency(w, b, 0.002, 4.0, 2.0);
  });
  antitone([&](double lam) {
    MatrixField b = MatrixField::identity(2);
    b.declare(lam, 1.0);
    return starshape_sufficiency(w, b, 0.002, 4.0, 2.0);
  });
  antitone([&](double l) {
    const GraphDomain wl = GraphDomain::wedge(2, 2.0 * std::atan(1.0 / l), Modulus::power(1.0, 1.0));
    return starshape_sufficiency(wl, a, 0.002, 4.0, 2.0);
  });
}

TEST_CASE("surface integrals") {
  const GraphDomain hp = GraphDomain::halfplane(2);
  auto one = [](const Vec&) { return 1.0; };
  CHECK(surface_integrate(hp, GraphPatch{{-0.3, 0, 0}, {0.4, 0, 0}, 64}, one) == doctest::Approx(0.7));
  // Slope L = cot(theta/2) on the right edge of the wedge.
  const GraphDomain w = GraphDomain::wedge(2, 2.0);
  const double L = 1.0 / std::tan(1.0);
  CHECK(surface_integrate(w, GraphPatch{{0.1, 0, 0}, {0.5, 0, 0}, 64}, one) ==
        doctest::Approx(0.4 * std::sqrt(1.0 + L * L)));
  // y^2 - x^2 vanishes on both edges of the right-angle wedge {y > |x|}.
  auto f = [](const Vec& x) { return x[1] * x[1] - x[0] * x[0]; };
  CHECK(std::abs(surface_integrate(quarter_wedge(), GraphPatch{{-0.5, 0, 0}, {0.5, 0, 0}, 64}, f)) < 1e-14);
  const GraphDomain hp3 = GraphDomain::halfplane(3);
  CHECK(surface_integrate(hp3, GraphPatch{{0, 0, 0}, {0.5, 0.2, 0}, 32}, one) == doctest::Approx(0.1));
}

TEST_CASE("surface element over a cube converges at first order") {
  const GraphDomain s = GraphDomain::sawtooth(2, 0.5, 3, SawtoothProfile::Scallop);
  auto one = [](const Vec&) { return 1.0; };
  // Independent arc length by fine chords.
  auto chord = [&](double a, double b) {
    double len = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x0 = a + (b - a) * i / n, x1 = a + (b - a) * (i + 1) / n;
      len += std::hypot(x1 - x0, s.phi({x1, 0, 0}) - s.phi({x0, 0, 0}));
    }
    return len;
  };
  const double exact = chord(0.05, 0.3);
  const double e1 = std::abs(surface_integrate(s, GraphPatch{{0.05, 0, 0}, {0.3, 0, 0}, 20}, one) - exact);
  const double e2 = std::abs(surface_integrate(s, GraphPatch{{0.05, 0, 0}, {0.3, 0, 0}, 40}, one) - exact);
  CHECK(e2 <= 0.6 * e1 + 1e-12);
}

TEST_CASE("sphere integration") {
  auto all = [](const Vec&) { return true; };
  auto one = [](const Vec&) { return 1.0; };
  CHECK(sphere_integrate(2, {}, 0.5, 512, all, one) == doctest::Approx(kPi));
  CHECK(sphere_integrate(3, {}, 0.5, 48, all, one) == doctest::Approx(kPi));
  const GraphDomain hp = GraphDomain::halfplane(2);
  CHECK(surface_integrate(hp, SpherePatch{{}, 1.0, 4096}, one) == doctest::Approx(kPi).epsilon(1e-6));
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 8);
  CHECK(s == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("tabulated domains") {
  GraphTable t;
  t.lo = {-1.0, 0.0, 0.0};
  t.spacing = 0.01;
  t.n0 = 201;
  for (int i = 0; i < t.n0; ++i) {
    const double x = -1.0 + 0.01 * i;
    t.values.push_back(0.5 * std::abs(x));
  }
  const GraphDomain g = GraphDomain::tabulated(2, t);
  CHECK(g.phi({0.3, 0, 0}) == doctest::Approx(0.15));
  CHECK(g.lipschitz() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(g.default_tolerance() == doctest::Approx(10.0 * 0.01 * 0.5).epsilon(1e-6));
  CHECK_THROWS_AS(g.phi({1.5, 0, 0}), OutOfRangeError);
  CHECK_THROWS_AS(quasiconvexity_check(g, 64, 33), OutOfRangeError);
}

TEST_CASE("domain hash depends on parameters") {
  CHECK(GraphDomain::halfplane(2).hash() == GraphDomain::halfplane(2).hash());
  CHECK(GraphDomain::halfplane(2).hash() != GraphDomain::halfplane(3).hash());
  CHECK(GraphDomain::wedge(2, 1.0).hash() != GraphDomain::wedge(2, 1.1).hash());
  CHECK(GraphDomain::halfplane(2).default_tolerance() == doctest::Approx(2e-8));
}
