#include "uclab/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "uclab/error.hpp"

namespace uclab {

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PipelineResult theorem_pipeline(const PipelineSpec& spec) {
  const GraphDomain& domain = spec.domain;
  const int d = domain.dim();
  PipelineResult out;

  const GridSolution sol = stage("solve", [&] {
    GridSolution s = solve(domain, spec.a, spec.ball, spec.data.u, spec.h, spec.solve);
    return s;
  });
  out.unknowns = sol.unknown_count();
  out.iterations = sol.iterations;
  out.solver_residual = sol.residual;

  stage("whitney", [&] {
    TreeBuild tb = decompose_for_tree(domain, spec.ball, spec.ball, spec.m0, spec.depth, spec.whitney);
    if (!tb.dec.certificate.pass()) throw CoverageError("Whitney certificate failed");
    out.tree = std::move(tb.tree);
    out.certificate = tb.dec.certificate;
    out.cuboids = tb.dec.cuboids.size();
    return 0;
  });
  const WhitneyTree& tree = out.tree;
  const std::size_t n = tree.nodes.size();

  stage("doubling", [&] {
    out.node_data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Cuboid& q = tree.nodes[i].q;
      try {
        out.node_data[i].n = doubling_index(sol, spec.a, domain, domain.lift(q.center), spec.S * q.side, spec.mass);
        out.node_data[i].has_n = true;
      } catch (const DegenerateMassError&) {
        out.node_data[i].has_n = false;
      }
    }
    return 0;
  });

  stage("nodal", [&] {
    out.translates.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Region region = Region::cuboid(vertical_translate(tree.nodes[i].q, domain), d);
      try {
        out.translates[i] = classify_sign(sol, region, spec.nodal);
      } catch (const EmptyRegionError&) {
        out.translates[i].region = region;
      }
      out.node_data[i].translate = out.translates[i].verdict;
    }
    const int k = std::min(spec.params.K, tree.depth);
    out.drop = doubling_drop_statistics(sol, spec.a, domain, tree, 0, spec.S, k, spec.mass);
    out.delta0_emp = out.drop.good_fraction;

    const Cuboid& root = tree.root().q;
    out.scale = spec.S * root.side;
    std::vector<double> rho_grid;
    for (int i = 0; i < 5; ++i) rho_grid.push_back(out.scale / 8.0 * std::exp2(-0.5 * i));
    const Footprint fp = project(root, d);
    const int m = std::max(spec.anchors_per_axis, 1);
    for (int b = 0; b < (d == 3 ? m : 1); ++b)
      for (int a = 0; a < m; ++a) {
        Vec xp = fp.lo;
        xp[0] += (a + 0.5) * fp.side / m;
        if (d == 3) xp[1] += (b + 0.5) * fp.side / m;
        AnchorBall ab;
        ab.anchor = domain.lift(xp);
        ab.ball = find_signless_ball(sol, domain, ab.anchor, out.scale, rho_grid, spec.nodal);
        out.balls.push_back(ab);
      }
    return 0;
  });

  stage("dimension", [&] {
    out.params = spec.params;
    if (spec.delta0_empirical && out.delta0_emp > 0.0 && out.delta0_emp < 1.0) out.params.delta0 = out.delta0_emp;
    if (spec.eps_from_s) out.params.eps = 1.0 / spec.S;
    out.params.d = d;
    out.params.validate();
    out.index = modified_index_recursion(tree, out.node_data, out.params);
    out.bound = dimension_bound(out.params);

    // Residual: boundary samples over the closed root footprint covered neither by
    // a sign-definite ball nor by a footprint with a sign-definite translate.
    const Cuboid& root = tree.root().q;
    const Footprint fp = project(root, d);
    const int per = std::max(1, static_cast<int>(std::floor(fp.side / spec.h + 1e-9)));
    for (int b = 0; b <= (d == 3 ? per : 0); ++b)
      for (int a = 0; a <= per; ++a) {
        Vec xp = fp.lo;
        xp[0] += a * fp.side / per;
        if (d == 3) xp[1] += b * fp.side / per;
        ++out.residual_samples;
        const Vec p = domain.lift(xp);
        bool covered = false;
        for (const AnchorBall& ab : out.balls)
          if (ab.ball.found && norm(p - ab.ball.y) < ab.ball.rho) {
            covered = true;
            break;
          }
        for (std::size_t i = 0; i < n && !covered; ++i)
          if (definite(out.translates[i].verdict) && project(tree.nodes[i].q, d).contains(xp, d)) covered = true;
        if (!covered) out.residual.push_back(xp);
      }
    std::vector<double> sides;
    for (double s = fp.side; s >= 2.0 * spec.h * (1.0 - 1e-12); s /= 2.0) sides.push_back(s);
    if (out.residual.empty() || sides.size() < 2) {
      out.residual_counts.sides = sides;
      out.residual_counts.counts.assign(sides.size(), out.residual.empty() ? 0.0 : 1.0);
      out.slope = 0.0;
    } else {
      out.residual_counts = box_count_points(out.residual, d - 1, fp.lo, sides);
      out.slope = out.residual_counts.slope;
    }
    out.asserted = spec.delta0_empirical ? (out.delta0_emp > 0.0 && out.delta0_emp < 1.0) : true;
    out.pass = !out.asserted || out.slope <= out.bound;
    return 0;
  });
  return out;
}

}  // namespace uclab
