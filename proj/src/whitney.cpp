#include "uclab/whitney.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "uclab/error.hpp"

namespace uclab {

namespace {

double vert(const Cuboid& q, int d) { return q.center[static_cast<std::size_t>(d - 1)]; }
double bottom_of(const Cuboid& q, int d, double dilation = 1.0) { return vert(q, d) - dilation * q.height() / 2.0; }
double top_of(const Cuboid& q, int d, double dilation = 1.0) { return vert(q, d) + dilation * q.height() / 2.0; }

int default_samples(int d, int requested) { return requested > 0 ? requested : (d == 2 ? 33 : 9); }

// Distance from a box to a ball centre minus radius < 0 means they meet.
bool box_meets_ball(const Cuboid& q, int d, const Ball& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double half = i == d - 1 ? q.height() / 2.0 : q.side / 2.0;
    const double gap = std::max(0.0, std::abs(b.center[ui] - q.center[ui]) - half);
    s += gap * gap;
  }
  return std::sqrt(s) < b.radius;
}

bool box_inside_ball(const Cuboid& q, int d, const Ball& b) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double half = i == d - 1 ? q.height() / 2.0 : q.side / 2.0;
    const double far = std::abs(b.center[ui] - q.center[ui]) + half;
    s += far * far;
  }
  return std::sqrt(s) <= b.radius;
}

template <typename F>
void for_samples(int d, const Vec& centre, double half_width, int samples, F&& f) {
  const int n = std::max(samples, 2);
  const int total = d == 2 ? n : n * n;
  for (int s = 0; s < total; ++s) {
    Vec x = centre;
    x[0] = centre[0] - half_width + 2.0 * half_width * (s % n) / (n - 1);
    if (d == 3) x[1] = centre[1] - half_width + 2.0 * half_width * (s / n) / (n - 1);
    x[static_cast<std::size_t>(d - 1)] = 0.0;
    f(x);
  }
}

Cuboid lattice_cuboid(double top_side, double stretch, int level, long long i, long long k, long long j, int d) {
  Cuboid q;
  q.side = std::ldexp(top_side, -level);
  q.stretch = stretch;
  q.level = level;
  q.center[0] = (static_cast<double>(i) + 0.5) * q.side;
  if (d == 3) q.center[1] = (static_cast<double>(k) + 0.5) * q.side;
  q.center[static_cast<std::size_t>(d - 1)] = (static_cast<double>(j) + 0.5) * q.height();
  return q;
}

}  // namespace

bool Cuboid::contains(const Vec& x, int d) const {
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double half = i == d - 1 ? height() / 2.0 : side / 2.0;
    if (x[ui] < center[ui] - half || x[ui] >= center[ui] + half) return false;
  }
  return true;
}


Vec Footprint::center(int d) const {
  Vec c = lo;
  for (int i = 0; i < d - 1; ++i) c[static_cast<std::size_t>(i)] += side / 2.0;
  return c;
}

bool Footprint::contains(const Vec& x, int d) const {
  for (int i = 0; i < d - 1; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    if (x[ui] < lo[ui] || x[ui] >= lo[ui] + side) return false;
  }
  return true;
}

double Footprint::measure(int d) const { return std::pow(side, d - 1); }

double phi_bound(const GraphDomain& domain, const Vec& centre, double half_width, int samples, int sign) {
  const int d = domain.dim();
  const int n = std::max(samples, 2);
  double best = sign > 0 ? -1e300 : 1e300;
  for_samples(d, centre, half_width, n, [&](const Vec& x) {
    const double v = domain.phi(x);
    best = sign > 0 ? std::max(best, v) : std::min(best, v);
  });
  const double spacing = 2.0 * half_width / (n - 1);
  const double slack = domain.lipschitz() * spacing * std::sqrt(static_cast<double>(d - 1)) / 2.0;
  return sign > 0 ? best + slack : best - slack;
}

namespace {

double sampled_max(const GraphDomain& domain, const Vec& centre, double half_width, int samples) {
  double best = -1e300;
  for_samples(domain.dim(), centre, half_width, samples, [&](const Vec& x) { best = std::max(best, domain.phi(x)); });
  return best;
}

// The decision uses the raw sampled maximum so that a rejected cuboid always
// has a sampled witness; condition (i) is certified separately with slack.
bool selected(const GraphDomain& domain, const Cuboid& q, double kappa, int samples) {
  const int d = domain.dim();
  return bottom_of(q, d, kappa) > sampled_max(domain, q.center, kappa * q.side / 2.0, samples);
}

Cuboid parent_of(const Cuboid& q, int d) {
  Cuboid p = q;
  p.side = 2.0 * q.side;
  p.level = q.level - 1;
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double w = i == d - 1 ? p.height() : p.side;
    p.center[ui] = (std::floor(q.center[ui] / w) + 0.5) * w;
  }
  return p;
}

bool meets_region(const GraphDomain& domain, const Ball& ball, const Cuboid& q, int samples) {
  const int d = domain.dim();
  if (!box_meets_ball(q, d, ball)) return false;
  return top_of(q, d) > phi_bound(domain, q.center, q.side / 2.0, samples, -1);
}

}  // namespace

WhitneyDecomposition decompose(const GraphDomain& domain, const Ball& ball, double min_scale,
                               const WhitneyOptions& options) {
  const int d = domain.dim();
  WhitneyDecomposition dec;
  dec.domain = domain;
  dec.ball = ball;
  dec.kappa = options.kappa;
  dec.W = options.W > 0.0 ? options.W : 2.0 * options.kappa + 1.0;
  dec.min_scale = min_scale;
  dec.sup_samples = default_samples(d, options.sup_samples);
  if (dec.kappa < 10.0) throw ConfigError("selection dilation must be at least 10");
  if (!(min_scale > 0.0)) throw ConfigError("min_scale must be positive");
  const double s = dec.stretch();
  const int samples = dec.sup_samples;

  struct Key {
    long long i, k, j;
  };
  auto top_level = [&](double side) {
    std::vector<Key> keys;
    const double hs = s * side;
    const long long i0 = static_cast<long long>(std::floor((ball.center[0] - ball.radius) / side));
    const long long i1 = static_cast<long long>(std::floor((ball.center[0] + ball.radius) / side));
    long long k0 = 0, k1 = 0;
    if (d == 3) {
      k0 = static_cast<long long>(std::floor((ball.center[1] - ball.radius) / side));
      k1 = static_cast<long long>(std::floor((ball.center[1] + ball.radius) / side));
    }
    const double cv = ball.center[static_cast<std::size_t>(d - 1)];
    const long long j0 = static_cast<long long>(std::floor((cv - ball.radius) / hs));
    const long long j1 = static_cast<long long>(std::floor((cv + ball.radius) / hs));
    for (long long j = j0; j <= j1; ++j)
      for (long long k = k0; k <= k1; ++k)
        for (long long i = i0; i <= i1; ++i) keys.push_back({i, k, j});
    return keys;
  };

  double side = std::exp2(std::ceil(std::log2(ball.radius / 8.0)));
  for (int guard = 0;; ++guard) {
    if (guard > 60) throw CoverageError("could not size the top-level cuboids");
    bool ok = true;
    for (const Key& key : top_level(side)) {
      const Cuboid q = lattice_cuboid(side, s, 0, key.i, key.k, key.j, d);
      if (meets_region(domain, ball, q, samples) && selected(domain, q, dec.kappa, samples)) {
        ok = false;
        break;
      }
    }
    if (ok) break;
    side *= 2.0;
  }
  dec.top_side = side;

  double sliver_volume = 0.0;
  struct Item {
    int level;
    long long i, k, j;
  };
  std::vector<Item> stack;
  const auto tops = top_level(side);
  for (auto it = tops.rbegin(); it != tops.rend(); ++it) stack.push_back({0, it->i, it->k, it->j});
  while (!stack.empty()) {
    const Item item = stack.back();
    stack.pop_back();
    const Cuboid q = lattice_cuboid(side, s, item.level, item.i, item.k, item.j, d);
    if (!meets_region(domain, ball, q, samples)) continue;
    if (item.level > 0 && selected(domain, q, dec.kappa, samples)) {
      dec.cuboids.push_back(q);
      continue;
    }
    if (q.side / 2.0 < min_scale * (1.0 - 1e-12)) {
      ++dec.slivers;
      sliver_volume += std::pow(q.side, d) * s;
      continue;
    }
    // Children pushed in reverse so they pop in (j, k, i) ascending order.
    const int kcount = d == 3 ? 2 : 1;
    for (int cj = 1; cj >= 0; --cj)
      for (int ck = kcount - 1; ck >= 0; --ck)
        for (int ci = 1; ci >= 0; --ci)
          stack.push_back({item.level + 1, 2 * item.i + ci, d == 3 ? 2 * item.k + ck : 0, 2 * item.j + cj});
  }
  if (dec.cuboids.empty()) throw CoverageError("no Whitney cuboid fits inside the ball and the domain");
  const double half_ball = 0.5 * (d == 2 ? 3.14159265358979323846 * ball.radius * ball.radius
                                         : 4.0 / 3.0 * 3.14159265358979323846 * std::pow(ball.radius, 3));
  dec.uncovered_fraction = std::min(1.0, sliver_volume / half_ball);
  dec.certificate = certify_whitney(dec);
  return dec;
}

WhitneyCertificate certify_whitney(const WhitneyDecomposition& dec) {
  const GraphDomain& domain = dec.domain;
  const int d = domain.dim();
  const int samples = dec.sup_samples;
  WhitneyCertificate cert;
  cert.dist_ratio_min = 1e300;
  cert.dist_ratio_max = 0.0;
  const std::size_t n = dec.cuboids.size();

  for (const Cuboid& q : dec.cuboids) {
    // (i)
    if (!(bottom_of(q, d, 10.0) > phi_bound(domain, q.center, 5.0 * q.side, samples, +1))) {
      cert.inside = false;
      ++cert.inside_failures;
    }
    // (ii): a graph point reaching the bottom of WQ, and the graph below the top at the centre.
    const double wb = bottom_of(q, d, dec.W);
    const double wt = top_of(q, d, dec.W);
    bool reach = false;
    for_samples(d, q.center, dec.W * q.side / 2.0, samples, [&](const Vec& x) {
      if (domain.phi(x) >= wb) reach = true;
    });
    if (!reach && q.level > 0) {
      // The parent's rejection witness lies in its kappa-dilate, which sits inside WQ when W >= 2 kappa + 1.
      const Cuboid p = parent_of(q, d);
      if (dec.W >= 2.0 * dec.kappa + 1.0 - 1e-12)
        for_samples(d, p.center, dec.kappa * p.side / 2.0, samples, [&](const Vec& x) {
          if (domain.phi(x) >= wb) reach = true;
        });
    }
    if (!reach || domain.phi(q.center) > wt) {
      cert.touches = false;
      ++cert.touch_failures;
    }
    // dist(Q, boundary) / side
    const double gap = bottom_of(q, d) - domain.phi(q.center);
    const double window = q.side / 2.0 + std::max(gap, 0.0);
    double best = 1e300;
    for_samples(d, q.center, window, samples, [&](const Vec& x) {
      const Vec p = domain.lift(x);
      double s2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double half = i == d - 1 ? q.height() / 2.0 : q.side / 2.0;
        const double g = std::max(0.0, std::abs(p[ui] - q.center[ui]) - half);
        s2 += g * g;
      }
      best = std::min(best, std::sqrt(s2));
    });
    const double ratio = best / q.side;
    cert.dist_ratio_min = std::min(cert.dist_ratio_min, ratio);
    cert.dist_ratio_max = std::max(cert.dist_ratio_max, ratio);
  }

  // (iii). Neighbours at most one level apart are counted column by column
  // with binary search over the sorted vertical indices. Pairs two or more
  // levels apart always break the size ratio; they are found through coarse
  // spatial hashes from the finer cuboid's side.
  int max_level = 0;
  for (const Cuboid& q : dec.cuboids) max_level = std::max(max_level, q.level);
  const auto levels = static_cast<std::size_t>(max_level + 1);
  const double st = dec.stretch();
  auto overlaps = [&](const Cuboid& a, const Cuboid& b) {
    for (int axis = 0; axis < d; ++axis) {
      const auto ua = static_cast<std::size_t>(axis);
      const double reach = 5.0 * (axis == d - 1 ? st : 1.0) * (a.side + b.side);
      if (!(std::abs(a.center[ua] - b.center[ua]) < reach)) return false;
    }
    return true;
  };
  using Key3 = std::tuple<long long, long long, long long>;
  struct KeyHash {
    std::size_t operator()(const Key3& k) const {
      const auto a = static_cast<std::uint64_t>(std::get<0>(k));
      const auto b = static_cast<std::uint64_t>(std::get<1>(k));
      const auto c = static_cast<std::uint64_t>(std::get<2>(k));
      return static_cast<std::size_t>(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL) * 0xC2B2AE3D27D4EB4FULL ^
                                      c * 0x165667B19E3779F9ULL);
    }
  };
  auto floor_index = [](double x, double w) { return static_cast<long long>(std::floor(x / w)); };

  // Columns keyed by (i, k, 0) holding (j, cuboid) sorted by j.
  using Column = std::vector<std::pair<long long, std::size_t>>;
  std::vector<std::unordered_map<Key3, Column, KeyHash>> columns(levels);
  // Cells ten sides wide keyed by (i, k, j).
  std::vector<std::unordered_map<Key3, std::vector<std::size_t>, KeyHash>> cells(levels);
  auto cell_of = [&](const Vec& x, double side, int axis) {
    return floor_index(x[static_cast<std::size_t>(axis)], (axis == d - 1 ? st : 1.0) * 10.0 * side);
  };
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Cuboid& q = dec.cuboids[idx];
    const auto lv = static_cast<std::size_t>(q.level);
    const long long i = floor_index(q.center[0], q.side);
    const long long k = d == 3 ? floor_index(q.center[1], q.side) : 0;
    const long long j = floor_index(q.center[static_cast<std::size_t>(d - 1)], st * q.side);
    columns[lv][Key3{i, k, 0}].emplace_back(j, idx);
    cells[lv][Key3{cell_of(q.center, q.side, 0), d == 3 ? cell_of(q.center, q.side, 1) : 0,
                   cell_of(q.center, q.side, d - 1)}]
        .push_back(idx);
  }
  for (auto& table : columns)
    for (auto& entry : table) std::sort(entry.second.begin(), entry.second.end());

  std::vector<int> count(n, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Cuboid& q = dec.cuboids[idx];
    const double cv = q.center[static_cast<std::size_t>(d - 1)];
    for (int lvl = std::max(q.level - 1, 0); lvl <= std::min(q.level + 1, max_level); ++lvl) {
      const auto& table = columns[static_cast<std::size_t>(lvl)];
      if (table.empty()) continue;
      const double w = std::ldexp(dec.top_side, -lvl);
      const double rh = 5.0 * (q.side + w);
      const double rv = 5.0 * st * (q.side + w);
      const long long i0 = floor_index(q.center[0] - rh, w) - 1, i1 = floor_index(q.center[0] + rh, w) + 1;
      long long k0 = 0, k1 = 0;
      if (d == 3) {
        k0 = floor_index(q.center[1] - rh, w) - 1;
        k1 = floor_index(q.center[1] + rh, w) + 1;
      }
      const long long j0 = floor_index(cv - rv, st * w) - 1, j1 = floor_index(cv + rv, st * w) + 1;
      for (long long k = k0; k <= k1; ++k)
        for (long long i = i0; i <= i1; ++i) {
          const auto it = table.find(Key3{i, k, 0});
          if (it == table.end()) continue;
          const Column& col = it->second;
          auto a = std::lower_bound(col.begin(), col.end(), std::make_pair(j0, std::size_t{0}));
          auto b = std::lower_bound(col.begin(), col.end(), std::make_pair(j1 + 1, std::size_t{0}));
          // Rows two cells inside the padded range overlap vertically for sure;
          // the rest, and every row's horizontal overlap, are tested exactly.
          if (a == b) continue;
          for (; a != b && a->first <= j0 + 2; ++a) count[idx] += overlaps(q, dec.cuboids[a->second]);
          for (; b != a && std::prev(b)->first >= j1 - 2; --b) count[idx] += overlaps(q, dec.cuboids[std::prev(b)->second]);
          if (a == b) continue;
          const Cuboid& probe = dec.cuboids[a->second];
          Cuboid flat = probe;
          flat.center[static_cast<std::size_t>(d - 1)] = cv;
          if (overlaps(q, flat)) count[idx] += static_cast<int>(b - a);
        }
    }
    for (int lvl = 0; lvl <= q.level - 2; ++lvl) {
      const auto& table = cells[static_cast<std::size_t>(lvl)];
      if (table.empty()) continue;
      const double other = std::ldexp(dec.top_side, -lvl);
      std::array<long long, 3> lo{0, 0, 0}, hi{0, 0, 0};
      for (int axis = 0; axis < d; ++axis) {
        const double reach = 5.0 * (axis == d - 1 ? st : 1.0) * (q.side + other);
        Vec a = q.center, b = q.center;
        a[static_cast<std::size_t>(axis)] -= reach;
        b[static_cast<std::size_t>(axis)] += reach;
        const std::size_t slot = axis == d - 1 ? 2 : static_cast<std::size_t>(axis);
        lo[slot] = cell_of(a, other, axis);
        hi[slot] = cell_of(b, other, axis);
      }
      for (long long c2 = lo[2]; c2 <= hi[2]; ++c2)
        for (long long c1 = lo[1]; c1 <= hi[1]; ++c1)
          for (long long c0 = lo[0]; c0 <= hi[0]; ++c0) {
            const auto it = table.find(Key3{c0, c1, c2});
            if (it == table.end()) continue;
            for (std::size_t other_idx : it->second) {
              if (!overlaps(q, dec.cuboids[other_idx])) continue;
              ++count[idx];
              ++count[other_idx];
              cert.bounded_overlap = false;
              ++cert.ratio_failures;
            }
          }
    }
  }
  for (int c : count) cert.d0 = std::max(cert.d0, c);
  if (n == 0) cert.dist_ratio_min = 0.0;
  return cert;
}

Footprint project(const Cuboid& q, int d) {
  Footprint f;
  f.side = q.side;
  for (int i = 0; i < d - 1; ++i) f.lo[static_cast<std::size_t>(i)] = q.center[static_cast<std::size_t>(i)] - q.side / 2.0;
  return f;
}

bool in_cylinder(const Cuboid& q, const Vec& x, int d) { return project(q, d).contains(x, d); }

Cuboid vertical_translate(const Cuboid& q, const GraphDomain& domain) {
  Cuboid t = q;
  t.center[static_cast<std::size_t>(domain.dim() - 1)] = domain.phi(q.center);
  return t;
}

namespace {

using FootKey = std::tuple<int, long long, long long>;

FootKey foot_key(const Cuboid& q, int d) {
  const long long i = std::llround(q.center[0] / q.side - 0.5);
  const long long k = d == 3 ? std::llround(q.center[1] / q.side - 0.5) : 0;
  return {q.level, i, k};
}

}  // namespace

WhitneyTree build_tree(const WhitneyDecomposition& dec, const Ball& b0, double m0, int depth) {
  const int d = dec.domain.dim();
  if (depth < 0) throw DepthError("tree depth must be nonnegative");
  Ball region{b0.center, m0 * b0.radius / 2.0};
  int root = -1;
  auto better = [&](const Cuboid& a, const Cuboid& b) {
    if (a.side != b.side) return a.side > b.side;
    const double oa = norm(horizontal(a.center - b0.center, d));
    const double ob = norm(horizontal(b.center - b0.center, d));
    if (oa != ob) return oa < ob;
    const double va = a.center[static_cast<std::size_t>(d - 1)];
    const double vb = b.center[static_cast<std::size_t>(d - 1)];
    if (va != vb) return va < vb;
    return a.center < b.center;
  };
  for (std::size_t i = 0; i < dec.cuboids.size(); ++i) {
    const Cuboid& q = dec.cuboids[i];
    if (!box_inside_ball(q, d, region)) continue;
    if (root < 0 || better(q, dec.cuboids[static_cast<std::size_t>(root)])) root = static_cast<int>(i);
  }
  if (root < 0) throw RootNotFoundError("no Whitney cuboid lies inside (M0/2) B0");
  const Cuboid& r0 = dec.cuboids[static_cast<std::size_t>(root)];

  std::map<FootKey, std::vector<std::size_t>> by_foot;
  for (std::size_t i = 0; i < dec.cuboids.size(); ++i) by_foot[foot_key(dec.cuboids[i], d)].push_back(i);

  WhitneyTree tree;
  tree.d = d;
  tree.depth = depth;
  tree.generations.resize(static_cast<std::size_t>(depth + 1));
  TreeNode rn;
  rn.q = r0;
  tree.nodes.push_back(rn);
  tree.generations[0].push_back(0);
  const auto [rl, ri, rk] = foot_key(r0, d);
  const double r0_vert = r0.center[static_cast<std::size_t>(d - 1)];
  for (int gen = 1; gen <= depth; ++gen) {
    const long long per = 1LL << gen;
    const long long kcount = d == 3 ? per : 1;
    for (long long b = 0; b < kcount; ++b)
      for (long long a = 0; a < per; ++a) {
        const FootKey key{rl + gen, ri * per + a, d == 3 ? rk * per + b : 0};
        const auto it = by_foot.find(key);
        int best = -1;
        if (it != by_foot.end())
          for (std::size_t idx : it->second) {
            const Cuboid& q = dec.cuboids[idx];
            if (q.center[static_cast<std::size_t>(d - 1)] >= r0_vert) continue;
            if (best < 0 || q.center[static_cast<std::size_t>(d - 1)] <
                                dec.cuboids[static_cast<std::size_t>(best)].center[static_cast<std::size_t>(d - 1)])
              best = static_cast<int>(idx);
          }
        if (best < 0) throw CoverageError("no representative cuboid below the root for a projected cube");
        TreeNode node;
        node.q = dec.cuboids[static_cast<std::size_t>(best)];
        node.generation = gen;
        // Parent is the generation gen-1 node with footprint index (a/2, b/2).
        const long long pper = per / 2;
        const std::size_t pslot = static_cast<std::size_t>((d == 3 ? (b / 2) * pper : 0) + a / 2);
        node.parent = tree.generations[static_cast<std::size_t>(gen - 1)][pslot];
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(node);
        tree.nodes[static_cast<std::size_t>(node.parent)].children.push_back(id);
        tree.generations[static_cast<std::size_t>(gen)].push_back(id);
      }
  }
  return tree;
}

TreeBuild decompose_for_tree(const GraphDomain& domain, const Ball& ball, const Ball& b0, double m0, int depth,
                             const WhitneyOptions& options) {
  const WhitneyDecomposition coarse = decompose(domain, ball, ball.radius / 64.0, options);
  const WhitneyTree probe = build_tree(coarse, b0, m0, 0);
  TreeBuild out;
  out.dec = decompose(domain, ball, std::ldexp(probe.root().q.side, -depth), options);
  out.tree = build_tree(out.dec, b0, m0, depth);
  return out;
}

std::vector<int> descendants(const WhitneyTree& tree, int node, int j) {
  if (node < 0 || static_cast<std::size_t>(node) >= tree.nodes.size()) throw OutOfRangeError("unknown tree node");
  if (tree.nodes[static_cast<std::size_t>(node)].generation + j > tree.depth || j < 0)
    throw DepthError("requested generation exceeds the tree depth");
  std::vector<int> cur{node};
  for (int step = 0; step < j; ++step) {
    std::vector<int> next;
    for (int c : cur) {
      const auto& ch = tree.nodes[static_cast<std::size_t>(c)].children;
      next.insert(next.end(), ch.begin(), ch.end());
    }
    cur.swap(next);
  }
  return cur;
}

std::vector<int> layer_query(const WhitneyDecomposition& dec, double shift) {
  const int d = dec.domain.dim();
  std::vector<int> out;
  for (std::size_t i = 0; i < dec.cuboids.size(); ++i) {
    const Cuboid& q = dec.cuboids[i];
    const double lo = phi_bound(dec.domain, q.center, q.side / 2.0, dec.sup_samples, -1) + shift;
    const double hi = phi_bound(dec.domain, q.center, q.side / 2.0, dec.sup_samples, +1) + shift;
    if (hi >= bottom_of(q, d) && lo < top_of(q, d)) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool partition_exact(const WhitneyTree& tree) {
  const int d = tree.d;
  const Cuboid& r = tree.root().q;
  const long long base_i = std::llround(r.center[0] / r.side - 0.5);
  const long long base_k = d == 3 ? std::llround(r.center[1] / r.side - 0.5) : 0;
  for (std::size_t gen = 0; gen < tree.generations.size(); ++gen) {
    const long long per = 1LL << gen;
    const long long kcount = d == 3 ? per : 1;
    std::vector<int> hits(static_cast<std::size_t>(per * kcount), 0);
    const double side = std::ldexp(r.side, -static_cast<int>(gen));
    for (int id : tree.generations[gen]) {
      const Cuboid& q = tree.nodes[static_cast<std::size_t>(id)].q;
      if (q.side != side) return false;
      const double fi = q.center[0] / side - 0.5;
      const double fk = d == 3 ? q.center[1] / side - 0.5 : 0.0;
      if (fi != std::round(fi) || fk != std::round(fk)) return false;
      const long long a = std::llround(fi) - base_i * per;
      const long long b = d == 3 ? std::llround(fk) - base_k * per : 0;
      if (a < 0 || a >= per || b < 0 || b >= kcount) return false;
      ++hits[static_cast<std::size_t>(b * per + a)];
    }
    for (int h : hits)
      if (h != 1) return false;
  }
  return true;
}

std::string serialize_tree(const WhitneyTree& tree) {
  std::ostringstream os;
  os << "# d=" << tree.d << " depth=" << tree.depth << "\n";
  os << "# generation\tcenter_x\tcenter_y\tcenter_z\tside\tstretch\tlevel\tparent\n";
  char buf[512];
  for (const TreeNode& n : tree.nodes) {
    std::snprintf(buf, sizeof buf, "%d\t%.17g\t%.17g\t%.17g\t%.17g\t%.17g\t%d\t%d\n", n.generation, n.q.center[0],
                  n.q.center[1], n.q.center[2], n.q.side, n.q.stretch, n.q.level, n.parent);
    os << buf;
  }
  return os.str();
}

WhitneyTree parse_tree(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  WhitneyTree tree;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      int d = 0, depth = 0;
      if (std::sscanf(line.c_str(), "# d=%d depth=%d", &d, &depth) == 2) {
        tree.d = d;
        tree.depth = depth;
        header = true;
      }
      continue;
    }
    TreeNode n;
    if (std::sscanf(line.c_str(), "%d\t%lf\t%lf\t%lf\t%lf\t%lf\t%d\t%d", &n.generation, &n.q.center[0], &n.q.center[1],
                    &n.q.center[2], &n.q.side, &n.q.stretch, &n.q.level, &n.parent) != 8)
      throw ConfigError("malformed tree record: " + line);
    tree.nodes.push_back(n);
  }
  if (!header || tree.nodes.empty()) throw ConfigError("tree file lacks a header or records");
  tree.generations.assign(static_cast<std::size_t>(tree.depth + 1), {});
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    TreeNode& n = tree.nodes[i];
    if (n.generation < 0 || n.generation > tree.depth) throw ConfigError("tree record outside the declared depth");
    tree.generations[static_cast<std::size_t>(n.generation)].push_back(static_cast<int>(i));
    if (n.parent >= 0) tree.nodes[static_cast<std::size_t>(n.parent)].children.push_back(static_cast<int>(i));
  }
  return tree;
}

}  // namespace uclab
