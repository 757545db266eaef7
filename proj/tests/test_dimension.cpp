#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "uclab/dimension.hpp"
#include "uclab/error.hpp"

using namespace uclab;

namespace {

// Direct product form of C(j, i) p^i (1-p)^(j-i), summed.
double direct_cdf(int j, int k_max, double p) {
  double total = 0.0;
  for (int i = 0; i <= k_max && i <= j; ++i) {
    double c = 1.0;
    for (int t = 1; t <= i; ++t) c = c * (j - i + t) / t;
    total += c * std::pow(p, i) * std::pow(1.0 - p, j - i);
  }
  return total;
}

double z_oracle(double b, double p) {
  return std::exp(b * std::log(p) + (1 - b) * std::log(1 - p) - b * std::log(b) - (1 - b) * std::log(1 - b));
}

// Complete binary tree of the given depth over [0, 1), numbered generation by generation.
WhitneyTree binary_tree(int depth) {
  WhitneyTree t;
  t.d = 2;
  t.depth = depth;
  t.generations.resize(static_cast<std::size_t>(depth + 1));
  for (int g = 0; g <= depth; ++g)
    for (int a = 0; a < (1 << g); ++a) {
      TreeNode n;
      n.generation = g;
      n.q.side = std::ldexp(1.0, -g);
      n.q.center = {(a + 0.5) * n.q.side, 1.0, 0.0};
      n.q.level = g;
      const int id = static_cast<int>(t.nodes.size());
      if (g > 0) {
        n.parent = t.generations[static_cast<std::size_t>(g - 1)][static_cast<std::size_t>(a / 2)];
        t.nodes[static_cast<std::size_t>(n.parent)].children.push_back(id);
      }
      t.nodes.push_back(n);
      t.generations[static_cast<std::size_t>(g)].push_back(id);
    }
  return t;
}

}  // namespace

TEST_CASE("alpha from delta0") {
  CHECK(alpha_from_delta0(0.25) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(alpha_from_delta0(0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(alpha_from_delta0(1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-6, 1.0 - 1e-6);
  for (int t = 0; t < 1000; ++t) {
    const double d0 = u(rng);
    const double a = alpha_from_delta0(d0);
    CHECK(d0 / (1.0 - d0) * (1.0 - a) / a == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(a < d0);
  }
  CHECK_THROWS_AS(alpha_from_delta0(0.0), OutOfRangeError);
  CHECK_THROWS_AS(alpha_from_delta0(1.0), OutOfRangeError);
}

TEST_CASE("eps0 from alpha") {
  CHECK(eps0_from_alpha(0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(eps0_from_alpha(0.1) == doctest::Approx(0.0800597388923062).epsilon(1e-12));
  CHECK(eps0_from_alpha(1e-9) < 1e-8);
  for (double a = 0.01; a < 0.99; a += 0.01) {
    const double e = eps0_from_alpha(a);
    CHECK(std::log1p(e) / (std::log1p(e) + std::log(2.0)) == doctest::Approx(a).epsilon(1e-12));
    // Below eps0 the two-branch product stays under 1.
    for (double f : {0.1, 0.5, 0.9, 0.999})
      CHECK(std::pow(0.5, a) * std::pow(1.0 + f * e, 1.0 - a) < 1.0);
    CHECK(std::pow(0.5, a) * std::pow(1.0 + e, 1.0 - a) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(eps0_from_alpha(1.0), OutOfRangeError);
}

TEST_CASE("rate z") {
  for (double p : {0.1, 0.25, 0.5, 0.8}) {
    CHECK(rate_z(p, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rate_z(0.0, p) == doctest::Approx(1.0 - p));
    for (int i = 1; i < 100; ++i) {
      const double b = p * i / 100.0;
      CHECK(rate_z(b, p) < 1.0);
      CHECK(rate_z(b, p) == doctest::Approx(z_oracle(b, p)).epsilon(1e-13));
    }
  }
  CHECK(rate_z(0.1, 0.25) == doctest::Approx(0.9301).epsilon(1e-4));
}

TEST_CASE("binomial tails") {
  const double oracle = std::pow(0.75, 10) + 10 * 0.25 * std::pow(0.75, 9) + 45 * 0.0625 * std::pow(0.75, 8);
  CHECK(binomial_tail_exact(10, 0.2, 0.25) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == doctest::Approx(0.525593).epsilon(1e-6));
  CHECK(binomial_tail_exact(37, 1.0, 0.3) == 1.0);
  CHECK(binomial_tail_exact(1, 0.5, 0.25) == doctest::Approx(0.75));
  for (int j : {1, 5, 20, 60})
    for (int k = 0; k <= j; k += 3)
      for (double p : {0.05, 0.25, 0.6}) CHECK(binomial_cdf(j, k, p) == doctest::Approx(direct_cdf(j, k, p)).epsilon(1e-12));
  // Large j stays finite and inside [0, 1].
  const double big = binomial_tail_exact(5000, 0.2, 0.25);
  CHECK(big > 0.0);
  CHECK(big < 1e-10);
  // Monotone in both arguments.
  for (int j : {10, 50, 200}) {
    double prev = 2.0;
    for (double p = 0.05; p < 0.96; p += 0.05) {
      const double v = binomial_tail_exact(j, 0.3, p);
      CHECK(v <= prev * (1 + 1e-12));
      prev = v;
    }
    prev = -1.0;
    for (double b = 0.0; b <= 1.0; b += 0.02) {
      const double v = binomial_tail_exact(j, b, 0.25);
      CHECK(v >= prev * (1 - 1e-12));
      prev = v;
    }
  }
  CHECK_THROWS_AS(binomial_tail_exact(0, 0.1, 0.25), OutOfRangeError);
}

TEST_CASE("stirling bound") {
  const TailBound t = binomial_tail_bound(100, 0.1, 0.25);
  CHECK(t.regime_ok);
  CHECK(t.exact == doctest::Approx(binomial_tail_exact(100, 0.1, 0.25)));
  CHECK(t.exact <= 4.0 * t.bound);
  CHECK(t.bound == doctest::Approx(2.0 / std::sqrt(2 * M_PI * 100 * 0.09) * std::pow(z_oracle(0.1, 0.25), 100)));
  double prev = t.bound;
  for (int j = 200; j <= 2000; j += 200) {
    const TailBound s = binomial_tail_bound(j, 0.1, 0.25);
    CHECK(s.bound < prev);
    CHECK(s.exact <= 4.0 * s.bound);
    prev = s.bound;
  }
  CHECK(prev < 1e-20);
  // delta0/(1-delta0) (1-beta)/beta = 1/3 * 1 is outside (2, 4).
  CHECK_FALSE(binomial_tail_bound(50, 0.25, 0.25).regime_ok);
}

TEST_CASE("ratio inequality in exact arithmetic") {
  for (auto [p, q] : std::vector<std::pair<long long, long long>>{{1, 10}, {1, 5}, {1, 4}, {2, 5}, {1, 2}, {9, 10}}) {
    const RatioInequalityReport r = ratio_inequality_exact(200, p, q);
    CHECK(r.holds);
    CHECK(r.fail_j == -1);
    long long expected = 0;
    for (long long j = 1; j <= 200; ++j) expected += j * p / q;
    CHECK(r.checked == static_cast<std::size_t>(expected));
  }
  CHECK_THROWS_AS(ratio_inequality_exact(10, 3, 3), OutOfRangeError);
}

TEST_CASE("dimension bound") {
  CombinatorialParams p;
  p.delta0 = 0.25;
  p.K = 4;
  p.d = 2;
  CHECK(p.M() == 16.0);
  const double expect = 1.0 + std::log(z_oracle(0.1, 0.25)) / std::log(16.0);
  CHECK(dimension_bound(p) == doctest::Approx(expect).epsilon(1e-13));
  CHECK(dimension_bound(p) == doctest::Approx(0.97387).epsilon(1e-5));
  double prev = 0.0;
  for (int K = 1; K <= 6; ++K) {
    p.K = K;
    const double b = dimension_bound(p);
    CHECK(b > prev);
    CHECK(b < 1.0);
    prev = b;
  }
  p.d = 3;
  p.K = 2;
  CHECK(dimension_bound(p) == doctest::Approx(2.0 * (1.0 + std::log(z_oracle(0.1, 0.25)) / std::log(16.0))));
  CHECK(dimension_bound(p) < 2.0);
  // delta0 near 0 drives z(alpha) to 1.
  p.delta0 = 1e-9;
  CHECK(dimension_bound(p) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("parameter validation") {
  CombinatorialParams p;
  CHECK_NOTHROW(p.validate());
  p.eps = p.eps0();
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.eps = 0.05;
  p.n0 = 1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.n0 = 2.0;
  p.d = 4;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("branching simulator tracks the exact tail") {
  CombinatorialParams p;
  p.delta0 = 0.25;
  p.K = 4;
  SimulationOptions o;
  o.depth = 8;
  o.trials = 2000;
  const SimulationReport r = branching_simulate(p, o);
  CHECK(r.good_children == 4);
  REQUIRE(r.depths.size() == 8);
  for (const SimulationDepth& s : r.depths) {
    CHECK(s.within_3sigma);
    CHECK(s.survivors == doctest::Approx(std::pow(16.0, s.depth) * s.fraction));
    // Survive while goods/j < 0.1, i.e. goods <= floor((j - 1) / 10) for j <= 10.
    CHECK(s.exact_tail == doctest::Approx(direct_cdf(s.depth, 0, 0.25)).epsilon(1e-12));
  }
  CHECK(r.slope <= r.bound + 0.05);
  CHECK(r.bound == dimension_bound(p));

  const SimulationReport again = branching_simulate(p, o);
  for (std::size_t i = 0; i < r.depths.size(); ++i) CHECK(again.depths[i].fraction == r.depths[i].fraction);
  o.mode = GoodMode::Floor;
  CHECK(branching_simulate(p, o).good_children == 4);
}

TEST_CASE("simulator with every child good") {
  CombinatorialParams p;
  p.delta0 = 0.99;  // ceil(0.99 * 16) = 16
  p.K = 4;
  SimulationOptions o;
  o.depth = 6;
  o.trials = 200;
  const SimulationReport r = branching_simulate(p, o);
  CHECK(r.good_children == 16);
  for (const SimulationDepth& s : r.depths) {
    CHECK(s.fraction == 0.0);
    CHECK(s.survivors == 0.0);
    CHECK(s.exact_tail == 0.0);
  }
  CHECK(r.slope == 0.0);
  o.mode = GoodMode::Floor;
  CHECK(branching_simulate(p, o).good_children == 15);
  o.depth = 11;
  CHECK_THROWS_AS(branching_simulate(p, o), ConfigError);
}

TEST_CASE("box counting") {
  // Middle-thirds Cantor prefix: ternary digits in {0, 2}.
  std::vector<std::array<long long, 2>> cantor;
  for (int mask = 0; mask < (1 << 10); ++mask) {
    long long v = 0;
    for (int b = 9; b >= 0; --b) v = 3 * v + ((mask >> b) & 1 ? 2 : 0);
    cantor.push_back({v, 0});
  }
  std::vector<int> levels;
  for (int l = 1; l <= 10; ++l) levels.push_back(l);
  CHECK(box_count_cells(cantor, 1, 3, 10, levels).slope == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));

  // Base-4 digits in {0, 3}.
  std::vector<std::array<long long, 2>> quarter;
  for (int mask = 0; mask < (1 << 10); ++mask) {
    long long v = 0;
    for (int b = 9; b >= 0; --b) v = 4 * v + ((mask >> b) & 1 ? 3 : 0);
    quarter.push_back({v, 0});
  }
  CHECK(std::abs(box_count_cells(quarter, 1, 4, 10, levels).slope - 0.5) <= 0.02);

  std::vector<std::array<long long, 2>> square;
  for (long long i = 0; i < 64; ++i)
    for (long long j = 0; j < 64; ++j) square.push_back({i, j});
  CHECK(box_count_cells(square, 2, 2, 6, {0, 1, 2, 3, 4, 5, 6}).slope == doctest::Approx(2.0));

  const std::vector<double> sides{1.0, 0.1, 0.01, 0.001};
  CHECK(box_count_points({{0.3, 0.7, 0.0}}, 2, {}, sides).slope == doctest::Approx(0.0));
  std::vector<Vec> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back({(i + 0.5) / 1000.0, 0.0, 0.0});
  const BoxCountReport seg = box_count_points(grid, 1, {}, sides);
  CHECK(seg.slope == doctest::Approx(1.0).epsilon(1e-9));
  for (std::size_t i = 1; i < seg.counts.size(); ++i) CHECK(seg.counts[i] >= seg.counts[i - 1]);

  // Counts never grow with box size for nested dyadic lattices.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> cloud;
  for (int i = 0; i < 500; ++i) cloud.push_back({u(rng), u(rng), 0.0});
  const BoxCountReport c = box_count_points(cloud, 2, {}, {1.0 / 64, 1.0 / 16, 1.0 / 4, 1.0});
  for (std::size_t i = 1; i < c.counts.size(); ++i) CHECK(c.counts[i] <= c.counts[i - 1]);
  CHECK(c.slope >= 0.0);
  CHECK(c.slope <= 2.0);

  CHECK_THROWS_AS(box_count_points({{0.1, 0.1, 0.0}}, 2, {}, {0.5}), CoverageError);
  CHECK_THROWS_AS(fit_box_counts({0.5, 0.25}, {0.0, 3.0}), CoverageError);
}

TEST_CASE("recursion in case (a) halves exactly one child per node") {
  const WhitneyTree t = binary_tree(2);
  std::vector<NodeData> data(t.nodes.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = {Verdict::Positive, 4.0 + 0.1 * static_cast<double>(i), true};
  CombinatorialParams p;
  p.delta0 = 0.5;
  p.eps = 0.1;
  p.K = 1;
  p.n0 = 2.0;
  const TreeIndexState s = modified_index_recursion(t, data, p);
  CHECK(s.root_value == 4.0);
  CHECK(s.undetermined == 0);
  REQUIRE(s.steps.size() == 3);
  for (int g = 0; g < 2; ++g)
    for (int id : t.generations[static_cast<std::size_t>(g)]) {
      const double parent = s.n_prime[static_cast<std::size_t>(id)];
      int halves = 0, grows = 0;
      for (int c : t.nodes[static_cast<std::size_t>(id)].children) {
        const double v = s.n_prime[static_cast<std::size_t>(c)];
        halves += v == parent / 2.0;
        grows += v == doctest::Approx(1.1 * parent);
        CHECK(s.case_a[static_cast<std::size_t>(c)]);
      }
      CHECK(halves == 1);
      CHECK(grows == 1);
    }
  for (double v : s.n_prime) CHECK(v > 0.0);
  CHECK(s.audit_failures == 0);
}

TEST_CASE("recursion with N'(R) = N0/2 uses the bare alpha threshold") {
  const WhitneyTree t = binary_tree(3);
  std::vector<NodeData> data(t.nodes.size(), NodeData{Verdict::Positive, 0.5, true});
  CombinatorialParams p;
  p.delta0 = 0.5;
  p.eps = 0.1;
  p.K = 1;
  p.n0 = 2.0;
  const TreeIndexState s = modified_index_recursion(t, data, p);
  CHECK(s.root_value == 1.0);
  const double alpha = p.alpha();
  // Walk every path and recompute survival from the good flags.
  for (int leaf : t.generations[3]) {
    std::vector<int> path;
    for (int v = leaf; v >= 0; v = t.nodes[static_cast<std::size_t>(v)].parent) path.insert(path.begin(), v);
    int goods = 0;
    bool alive = true;
    for (int j = 1; j <= 3; ++j) {
      const auto v = static_cast<std::size_t>(path[static_cast<std::size_t>(j)]);
      goods += s.good[v];
      CHECK(s.goodness[v] == doctest::Approx(static_cast<double>(goods) / j));
      alive = alive && static_cast<double>(goods) / j < alpha;
      CHECK(static_cast<bool>(s.survivor[v]) == alive);
      // Frequent goodness forces N' below N0/2.
      if (s.goodness[v] >= alpha) CHECK(s.n_prime[v] < p.n0 / 2.0);
    }
  }
  CHECK(s.audit_checked > 0);
  CHECK(s.audit_failures == 0);
  const BoxCountReport b = survivor_dimension(t, s, 1);
  CHECK(b.counts.size() == 4);
  CHECK(b.counts[0] == 1.0);
  CHECK(b.counts[3] == 1.0);  // only the all-bad path survives
}

TEST_CASE("recursion in case (b)") {
  const WhitneyTree t = binary_tree(1);
  std::vector<NodeData> data(t.nodes.size());
  data[0] = {Verdict::SignChanging, 8.0, true};
  data[1] = {Verdict::Negative, 3.0, true};
  data[2] = {Verdict::SignChanging, 0.2, true};
  CombinatorialParams p;
  p.K = 1;
  const TreeIndexState s = modified_index_recursion(t, data, p);
  CHECK(s.n_prime[1] == 4.0);
  CHECK(s.good[1]);
  CHECK(s.n_prime[2] == 1.0);  // max(N, N0/2)
  CHECK_FALSE(s.good[2]);

  data[2] = {Verdict::Undetermined, 0.0, false};
  const TreeIndexState u = modified_index_recursion(t, data, p);
  CHECK(u.undetermined == 2);
  CHECK(u.n_prime[2] == 1.0);
  data.pop_back();
  CHECK_THROWS_AS(modified_index_recursion(t, data, p), ConfigError);
}
