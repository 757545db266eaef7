#include "uclab/nodal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "uclab/error.hpp"
#include "uclab/parallel.hpp"

namespace uclab {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Positive: return "positive";
    case Verdict::Negative: return "negative";
    case Verdict::SignChanging: return "sign-changing";
    case Verdict::Undetermined: return "undetermined";
  }
  return "undetermined";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "positive") return Verdict::Positive;
  if (s == "negative") return Verdict::Negative;
  if (s == "sign-changing") return Verdict::SignChanging;
  if (s == "undetermined") return Verdict::Undetermined;
  throw ConfigError("unknown verdict '" + s + "'");
}

Region Region::box(const Vec& lo, const Vec& hi) {
  Region r;
  r.kind = Kind::Box;
  r.lo = lo;
  r.hi = hi;
  return r;
}

Region Region::ball(const Vec& center, double radius) {
  Region r;
  r.kind = Kind::Ball;
  r.center = center;
  r.radius = radius;
  return r;
}

Region Region::cuboid(const Cuboid& q, int d) {
  Vec lo = q.center, hi = q.center;
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double half = i == d - 1 ? q.height() / 2.0 : q.side / 2.0;
    lo[ui] -= half;
    hi[ui] += half;
  }
  return box(lo, hi);
}

bool Region::contains(const Vec& x, int d) const {
  if (kind == Kind::Ball) return norm(x - center) <= radius * (1.0 + 1e-12);
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double slack = 1e-12 * std::max(1.0, hi[ui] - lo[ui]);
    if (x[ui] < lo[ui] - slack || x[ui] > hi[ui] + slack) return false;
  }
  return true;
}

void Region::bounds(int d, Vec& lo_out, Vec& hi_out) const {
  if (kind == Kind::Box) {
    lo_out = lo;
    hi_out = hi;
    return;
  }
  lo_out = center;
  hi_out = center;
  for (int i = 0; i < d; ++i) {
    lo_out[static_cast<std::size_t>(i)] -= radius;
    hi_out[static_cast<std::size_t>(i)] += radius;
  }
}

std::string Region::describe(int d) const {
  char buf[256];
  if (kind == Kind::Ball) {
    if (d == 2)
      std::snprintf(buf, sizeof buf, "ball(%.17g,%.17g; r=%.17g)", center[0], center[1], radius);
    else
      std::snprintf(buf, sizeof buf, "ball(%.17g,%.17g,%.17g; r=%.17g)", center[0], center[1], center[2], radius);
  } else if (d == 2) {
    std::snprintf(buf, sizeof buf, "box([%.17g,%.17g]x[%.17g,%.17g])", lo[0], hi[0], lo[1], hi[1]);
  } else {
    std::snprintf(buf, sizeof buf, "box([%.17g,%.17g]x[%.17g,%.17g]x[%.17g,%.17g])", lo[0], hi[0], lo[1], hi[1], lo[2],
                  hi[2]);
  }
  return buf;
}

SignClassification classify_sign(const GridSolution& u, const Region& region, const NodalOptions& options) {
  if (!(options.eta > 0.0 && options.eta < 1.0)) throw ConfigError("relative margin must lie in (0, 1)");
  const Mesh& m = u.mesh;
  const int d = m.d;
  Vec lo, hi;
  region.bounds(d, lo, hi);
  std::array<int, 3> a{0, 0, 0}, b{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    a[ui] = std::max(0, static_cast<int>(std::ceil((lo[ui] - m.lo[ui]) / m.h - 1e-9)));
    b[ui] = std::min(m.n[ui] - 1, static_cast<int>(std::floor((hi[ui] - m.lo[ui]) / m.h + 1e-9)));
  }
  SignClassification out;
  out.region = region;
  std::size_t grid_nodes = 0;
  std::vector<double> tested;
  for (int k = a[2]; k <= b[2]; ++k)
    for (int j = a[1]; j <= b[1]; ++j)
      for (int i = a[0]; i <= b[0]; ++i) {
        const std::array<int, 3> c{i, j, k};
        const Vec x = m.node(c);
        if (!region.contains(x, d)) continue;
        ++grid_nodes;
        const std::size_t idx = m.index(i, j, k);
        if (u.kind[idx] != NodeKind::Unknown) continue;
        tested.push_back(u.values[idx]);
      }
  if (grid_nodes == 0) throw EmptyRegionError("region " + region.describe(d) + " contains no grid nodes");
  out.nodes = tested.size();
  double lo_abs = std::numeric_limits<double>::infinity();
  for (double v : tested) {
    out.sup = std::max(out.sup, std::abs(v));
    lo_abs = std::min(lo_abs, std::abs(v));
  }
  if (tested.empty() || out.sup == 0.0) {
    out.margin = 0.0;
    out.verdict = Verdict::Undetermined;
    return out;
  }
  out.margin = lo_abs / out.sup;
  const double threshold = options.eta * out.sup;
  for (double v : tested) {
    if (v > threshold) ++out.positive;
    if (v < -threshold) ++out.negative;
  }
  if (out.positive > 0 && out.negative > 0) {
    out.verdict = Verdict::SignChanging;
  } else if (out.nodes < options.min_nodes) {
    out.verdict = Verdict::Undetermined;
  } else if (out.positive == out.nodes) {
    out.verdict = Verdict::Positive;
  } else if (out.negative == out.nodes) {
    out.verdict = Verdict::Negative;
  } else {
    out.verdict = Verdict::Undetermined;
  }
  return out;
}

SignlessBall find_signless_ball(const GridSolution& u, const GraphDomain& domain, const Vec& anchor, double scale,
                                std::vector<double> rho_grid, const NodalOptions& options, int candidates_per_axis) {
  const int d = domain.dim();
  const double reach = scale / 8.0;
  std::sort(rho_grid.begin(), rho_grid.end(), std::greater<>());
  rho_grid.erase(std::remove_if(rho_grid.begin(), rho_grid.end(),
                                [&](double r) { return !(r > 0.0) || r > reach * (1.0 + 1e-12); }),
                 rho_grid.end());

  // Candidate boundary points, nearest to the anchor first.
  struct Candidate {
    double dist;
    Vec y;
  };
  std::vector<Candidate> cand;
  const int n = std::max(candidates_per_axis, 1) | 1;
  const int half = n / 2;
  for (int b = -(d == 3 ? half : 0); b <= (d == 3 ? half : 0); ++b)
    for (int a = -half; a <= half; ++a) {
      Vec xp = anchor;
      xp[0] += reach * a / std::max(half, 1);
      if (d == 3) xp[1] += reach * b / std::max(half, 1);
      const Vec y = domain.lift(xp);
      const double dist = norm(y - anchor);
      if (dist < reach * (1.0 + 1e-12)) cand.push_back({dist, y});
    }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& p, const Candidate& q) { return p.dist < q.dist; });

  SignlessBall out;
  out.candidates = cand.size();
  for (double rho : rho_grid) {
    for (const Candidate& c : cand) {
      SignClassification s;
      try {
        s = classify_sign(u, Region::ball(c.y, rho), options);
      } catch (const EmptyRegionError&) {
        continue;
      }
      if (definite(s.verdict)) {
        out.found = true;
        out.y = c.y;
        out.rho = rho;
        out.classification = s;
        return out;
      }
    }
  }
  return out;
}

CuboidCover signless_cuboid_cover(const GridSolution& u, const GraphDomain& domain, const WhitneyTree& tree, int node,
                                  int k, const NodalOptions& options) {
  const int d = domain.dim();
  const std::vector<int> desc = descendants(tree, node, k);
  CuboidCover out;
  out.classifications.resize(desc.size());
  double covered = 0.0;
  for (std::size_t i = 0; i < desc.size(); ++i) {
    const Cuboid& q = tree.nodes[static_cast<std::size_t>(desc[i])].q;
    const Cuboid t = vertical_translate(q, domain);
    try {
      out.classifications[i] = classify_sign(u, Region::cuboid(t, d), options);
    } catch (const EmptyRegionError&) {
      out.classifications[i].region = Region::cuboid(t, d);
      out.classifications[i].verdict = Verdict::Undetermined;
    }
    if (definite(out.classifications[i].verdict)) {
      out.nodes.push_back(desc[i]);
      covered += project(q, d).measure(d);
    }
  }
  const double total = project(tree.nodes[static_cast<std::size_t>(node)].q, d).measure(d);
  out.fraction = std::clamp(covered / total, 0.0, 1.0);
  return out;
}

double n_star(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Cuboid& q, double s,
              const MassOptions& options, Vec* anchor) {
  const Vec x = domain.lift(q.center);
  if (anchor) *anchor = x;
  return doubling_index(u, a, domain, x, s * q.side, options) + 1.0;
}

DropStatistics doubling_drop_statistics(const GridSolution& u, const MatrixField& a, const GraphDomain& domain,
                                        const WhitneyTree& tree, int root, double s, int k,
                                        const MassOptions& options) {
  const int d = domain.dim();
  DropStatistics out;
  const Cuboid& r = tree.nodes[static_cast<std::size_t>(root)].q;
  out.root_n_star = n_star(u, a, domain, r, s, options);
  const std::vector<int> desc = descendants(tree, root, k);
  out.nodes.resize(desc.size());
  parallel_for(desc.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      DropNode& dn = out.nodes[i];
      dn.node = desc[i];
      const Cuboid& q = tree.nodes[static_cast<std::size_t>(dn.node)].q;
      try {
        dn.n_star = n_star(u, a, domain, q, s, options, &dn.anchor);
        dn.good = dn.n_star <= 0.5 * out.root_n_star;
      } catch (const Error& err) {
        dn.degenerate = true;
        dn.flag = err.what();
      }
      try {
        const StarshapeReport sr = starshape_check(domain, a, dn.anchor, 2.0 * s * q.side, 64);
        dn.starshaped = sr.pass;
      } catch (const Error&) {
        dn.starshaped = false;
      }
    }
  });
  double good = 0.0;
  for (const DropNode& dn : out.nodes) {
    if (!dn.starshaped) ++out.starshape_violations;
    if (dn.degenerate) {
      ++out.excluded;
      continue;
    }
    const Cuboid& q = tree.nodes[static_cast<std::size_t>(dn.node)].q;
    if (dn.good) good += project(q, d).measure(d);
    out.inflation_max = std::max(out.inflation_max, dn.n_star / out.root_n_star);
  }
  out.good_fraction = std::clamp(good / project(r, d).measure(d), 0.0, 1.0);
  return out;
}

}  // namespace uclab
