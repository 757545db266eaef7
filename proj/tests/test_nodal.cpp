#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "uclab/error.hpp"
#include "uclab/nodal.hpp"

using namespace uclab;

namespace {

const Ball kUnit{{0.0, 0.0, 0.0}, 1.0};
constexpr double kH = 1.0 / 64.0;

const GridSolution& x2_solution() {
  static const GridSolution s =
      solve(GraphDomain::halfplane(2), MatrixField::identity(2), kUnit, [](const Vec& x) { return x[1]; }, kH);
  return s;
}

// Im z^2 = 2 x1 x2, zero set {x1 = 0}.
const GridSolution& imz2_solution() {
  static const GridSolution s = solve(GraphDomain::halfplane(2), MatrixField::identity(2), kUnit,
                                      [](const Vec& x) { return 2.0 * x[0] * x[1]; }, kH);
  return s;
}

const GridSolution& wedge_solution() {
  static const GridSolution s = [] {
    const AnalyticSolution w = analytic_library("wedge_harmonic", {std::numbers::pi / 2.0});
    return solve(GraphDomain::wedge(2, std::numbers::pi / 2.0), MatrixField::identity(2), kUnit, w.u, kH);
  }();
  return s;
}

// Complete dyadic tree over the footprint [x0, x0 + side), nodes parked above
// the graph. `reversed` numbers the nodes of each generation backwards.
WhitneyTree dyadic_tree(double x0, double side, int depth, bool reversed) {
  WhitneyTree t;
  t.d = 2;
  t.depth = depth;
  t.generations.resize(static_cast<std::size_t>(depth + 1));
  std::vector<std::vector<int>> slots(static_cast<std::size_t>(depth + 1));
  for (int g = 0; g <= depth; ++g) {
    const int count = 1 << g;
    slots[static_cast<std::size_t>(g)].assign(static_cast<std::size_t>(count), -1);
    for (int n = 0; n < count; ++n) {
      const int a = reversed ? count - 1 - n : n;
      TreeNode node;
      const double s = std::ldexp(side, -g);
      node.q.side = s;
      node.q.stretch = 1.0;
      node.q.level = g;
      node.q.center = {x0 + (a + 0.5) * s, 3.0 * s, 0.0};
      node.generation = g;
      const int id = static_cast<int>(t.nodes.size());
      t.nodes.push_back(node);
      t.generations[static_cast<std::size_t>(g)].push_back(id);
      slots[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)] = id;
    }
  }
  for (int g = 1; g <= depth; ++g)
    for (int n = 0; n < (1 << g); ++n) {
      const int a = reversed ? (1 << g) - 1 - n : n;
      const int id = slots[static_cast<std::size_t>(g)][static_cast<std::size_t>(a)];
      const int parent = slots[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(a / 2)];
      t.nodes[static_cast<std::size_t>(id)].parent = parent;
      t.nodes[static_cast<std::size_t>(parent)].children.push_back(id);
    }
  return t;
}

}  // namespace

TEST_CASE("verdict strings round trip") {
  for (Verdict v : {Verdict::Positive, Verdict::Negative, Verdict::SignChanging, Verdict::Undetermined})
    CHECK(verdict_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(verdict_from_string("maybe"), ConfigError);
}

TEST_CASE("classify_sign examples") {
  const Region inner = Region::box({-0.3, 0.1, 0.0}, {0.3, 0.4, 0.0});
  const SignClassification p = classify_sign(x2_solution(), inner);
  CHECK(p.verdict == Verdict::Positive);
  CHECK(p.margin == doctest::Approx(0.25).epsilon(0.05));
  CHECK(p.nodes >= 8);

  // Product of the two edge distances is positive across the symmetry axis.
  CHECK(classify_sign(wedge_solution(), Region::box({-0.2, 0.3, 0.0}, {0.2, 0.6, 0.0})).verdict == Verdict::Positive);

  const SignClassification s = classify_sign(imz2_solution(), inner);
  CHECK(s.verdict == Verdict::SignChanging);
  CHECK(s.positive > 0);
  CHECK(s.negative > 0);
  CHECK(classify_sign(imz2_solution(), Region::box({-0.4, 0.1, 0.0}, {-0.1, 0.3, 0.0})).verdict ==
        Verdict::Negative);
  CHECK(classify_sign(imz2_solution(), Region::ball({0.3, 0.3, 0.0}, 0.1)).verdict == Verdict::Positive);
}

TEST_CASE("regions without nodes and with too few nodes") {
  CHECK_THROWS_AS(classify_sign(x2_solution(), Region::box({5.0, 5.0, 0.0}, {6.0, 6.0, 0.0})), EmptyRegionError);
  // A ball slightly wider than h around a node holds five nodes.
  const SignClassification few = classify_sign(x2_solution(), Region::ball({0.25, 0.5, 0.0}, 1.1 * kH));
  CHECK(few.nodes == 5);
  CHECK(few.verdict == Verdict::Undetermined);
  // Entirely below the graph: nodes exist but none are tested.
  const SignClassification below = classify_sign(x2_solution(), Region::box({-0.2, -0.3, 0.0}, {0.2, -0.1, 0.0}));
  CHECK(below.nodes == 0);
  CHECK(below.verdict == Verdict::Undetermined);
  NodalOptions bad;
  bad.eta = 1.0;
  CHECK_THROWS_AS(classify_sign(x2_solution(), Region::ball({0.0, 0.5, 0.0}, 0.1), bad), ConfigError);
}

TEST_CASE("definite verdicts survive shrinking") {
  const Region big = Region::box({-0.5, 0.05, 0.0}, {0.5, 0.6, 0.0});
  REQUIRE(classify_sign(x2_solution(), big).verdict == Verdict::Positive);
  REQUIRE(classify_sign(imz2_solution(), Region::box({0.05, 0.05, 0.0}, {0.6, 0.6, 0.0})).verdict ==
          Verdict::Positive);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.05, 0.6), vx(0.05, 0.6);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    double a = ux(rng), b = ux(rng), c = uy(rng), e = uy(rng);
    const Region sub = Region::box({std::min(a, b), std::min(c, e), 0.0}, {std::max(a, b), std::max(c, e), 0.0});
    SignClassification s;
    try {
      s = classify_sign(x2_solution(), sub);
    } catch (const EmptyRegionError&) {
      continue;
    }
    if (s.nodes < 8) continue;
    CHECK(s.verdict == Verdict::Positive);
    a = vx(rng), b = vx(rng);
    const Region sub2 = Region::box({std::min(a, b), std::min(c, e), 0.0}, {std::max(a, b), std::max(c, e), 0.0});
    try {
      s = classify_sign(imz2_solution(), sub2);
    } catch (const EmptyRegionError&) {
      continue;
    }
    if (s.nodes >= 8) CHECK(s.verdict == Verdict::Positive);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("signless balls") {
  const std::vector<double> rhos{0.025, 0.05, 0.1};
  for (double ax : {-0.3, 0.0, 0.17}) {
    const SignlessBall b = find_signless_ball(x2_solution(), GraphDomain::halfplane(2), {ax, 0.0, 0.0}, 0.8, rhos);
    CHECK(b.found);
    CHECK(b.rho == 0.1);
    CHECK(b.y[0] == doctest::Approx(ax));
    CHECK(b.y[1] == 0.0);
  }
  // The zero set {x1 = 0} never meets the returned ball.
  for (double ax : {0.0, 0.01, -0.02}) {
    const SignlessBall b = find_signless_ball(imz2_solution(), GraphDomain::halfplane(2), {ax, 0.0, 0.0}, 0.8, rhos);
    REQUIRE(b.found);
    // Tangency at the graph point (0, 0) stays outside the open domain.
    CHECK(std::abs(b.y[0]) >= b.rho);
    CHECK(b.classification.verdict == (b.y[0] > 0 ? Verdict::Positive : Verdict::Negative));
  }
  const GraphDomain w = GraphDomain::wedge(2, std::numbers::pi / 2.0);
  const SignlessBall c = find_signless_ball(wedge_solution(), w, {0.0, 0.0, 0.0}, 0.8, rhos);
  CHECK(c.found);
  CHECK(c.classification.verdict == Verdict::Positive);
  // Radii beyond scale/8 are dropped.
  CHECK_FALSE(find_signless_ball(x2_solution(), GraphDomain::halfplane(2), {}, 0.1, {0.5}).found);
}

TEST_CASE("cuboid covers") {
  const GraphDomain hp = GraphDomain::halfplane(2);
  const WhitneyTree t = dyadic_tree(-0.2, 0.5, 2, false);
  const CuboidCover all = signless_cuboid_cover(x2_solution(), hp, t, 0, 2);
  CHECK(all.fraction == 1.0);
  CHECK(all.nodes.size() == 4);

  // Columns of width 1/8 from -0.2; only [-0.075, 0.05) meets x1 = 0.
  const CuboidCover z = signless_cuboid_cover(imz2_solution(), hp, t, 0, 2);
  CHECK(z.fraction == doctest::Approx(0.75));
  CHECK(z.classifications[1].verdict == Verdict::SignChanging);
  CHECK(z.classifications[0].verdict == Verdict::Negative);
  CHECK(z.classifications[3].verdict == Verdict::Positive);

  // Checkerboard signs on every unknown node.
  GridSolution osc = x2_solution();
  for (std::size_t i = 0; i < osc.values.size(); ++i) {
    if (osc.kind[i] != NodeKind::Unknown) continue;
    const auto c = osc.mesh.coords(i);
    osc.values[i] = (c[0] + c[1]) % 2 == 0 ? 1.0 : -1.0;
  }
  const CuboidCover none = signless_cuboid_cover(osc, hp, t, 0, 2);
  CHECK(none.fraction == 0.0);
  CHECK(none.nodes.empty());
  CHECK_THROWS_AS(signless_cuboid_cover(x2_solution(), hp, t, 0, 3), DepthError);
}

TEST_CASE("doubling drop statistics") {
  const GraphDomain hp = GraphDomain::halfplane(2);
  const AnalyticSolution u4 = analytic_library("halfplane_harmonic_k", {4.0});
  const GridSolution s = solve(hp, MatrixField::identity(2), kUnit, u4.u, kH);
  const WhitneyTree fwd = dyadic_tree(0.05, 0.125, 2, false);
  const WhitneyTree rev = dyadic_tree(0.05, 0.125, 2, true);
  const DropStatistics a = doubling_drop_statistics(s, MatrixField::identity(2), hp, fwd, 0, 2.0, 2);
  const DropStatistics b = doubling_drop_statistics(s, MatrixField::identity(2), hp, rev, 0, 2.0, 2);
  CHECK(a.nodes.size() == 4);
  CHECK(a.good_fraction >= 0.0);
  CHECK(a.good_fraction <= 1.0);
  CHECK(a.root_n_star >= 1.0);
  CHECK(a.good_fraction == b.good_fraction);
  CHECK(a.inflation_max == b.inflation_max);
  CHECK(a.excluded == b.excluded);
  // Each node's N* matches its mirror-numbered twin.
  for (const DropNode& n : a.nodes) {
    const auto twin = std::find_if(b.nodes.begin(), b.nodes.end(),
                                   [&](const DropNode& m) { return m.anchor[0] == n.anchor[0]; });
    REQUIRE(twin != b.nodes.end());
    CHECK(twin->n_star == n.n_star);
    CHECK(twin->good == n.good);
  }
}
