#include "uclab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "uclab/error.hpp"

namespace uclab {

namespace {

// NaN and infinities have no JSON form.
Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

Json report_header(const std::string& command, const RunConfig& cfg) {
  Json j;
  j["tool"] = "uclab";
  j["version"] = kVersion;
  j["command"] = command;
  j["config_hash"] = hex_hash(config_hash(cfg));
  j["config"] = Json::parse(canonical_json(cfg));
  return j;
}

Json to_json(const Vec& v, int d) {
  Json a = Json::array();
  for (int i = 0; i < d; ++i) a.push_back(number(v[static_cast<std::size_t>(i)]));
  return a;
}

Json to_json(const SignClassification& s, int d) {
  return Json{{"region", s.region.describe(d)}, {"verdict", to_string(s.verdict)}, {"margin", number(s.margin)},
              {"sup", number(s.sup)}, {"nodes", s.nodes}, {"positive", s.positive}, {"negative", s.negative}};
}

Json to_json(const WhitneyCertificate& c) {
  return Json{{"inside", c.inside},
              {"touches", c.touches},
              {"bounded_overlap", c.bounded_overlap},
              {"inside_failures", c.inside_failures},
              {"touch_failures", c.touch_failures},
              {"ratio_failures", c.ratio_failures},
              {"overlap_constant", c.d0},
              {"dist_ratio_min", number(c.dist_ratio_min)},
              {"dist_ratio_max", number(c.dist_ratio_max)},
              {"pass", c.pass()}};
}

Json to_json(const BoxCountReport& b) {
  Json sides = Json::array(), counts = Json::array();
  for (double s : b.sides) sides.push_back(number(s));
  for (double c : b.counts) counts.push_back(number(c));
  return Json{{"sides", sides}, {"counts", counts}, {"slope", number(b.slope)}, {"intercept", number(b.intercept)}};
}

Json to_json(const CombinatorialParams& p) {
  Json j{{"delta0", number(p.delta0)}, {"eps", number(p.eps)}, {"N0", number(p.n0)}, {"K", p.K}, {"d", p.d},
         {"M", number(p.M())}};
  j["alpha"] = number(p.alpha());
  j["eps0"] = number(p.eps0());
  j["z_alpha"] = number(rate_z(p.alpha(), p.delta0));
  j["bound"] = number(dimension_bound(p));
  return j;
}

Json to_json(const FrequencyCurves& c) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < c.r.size(); ++i)
    rows.push_back(Json{{"r", number(c.r[i])}, {"H", number(c.H[i])}, {"D", number(c.D[i])}, {"N", number(c.N[i])}});
  return rows;
}

Json nodal_report(const WhitneyTree& tree, const std::vector<NodeData>& data,
                  const std::vector<SignClassification>& translates, const DropStatistics& drop) {
  Json nodes = Json::array();
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    Json n = to_json(translates[i], tree.d);
    n["node"] = i;
    n["generation"] = tree.nodes[i].generation;
    n["doubling"] = data[i].has_n ? number(data[i].n) : Json(nullptr);
    nodes.push_back(n);
  }
  Json drops = Json::array();
  for (const DropNode& dn : drop.nodes)
    drops.push_back(Json{{"node", dn.node}, {"n_star", number(dn.n_star)}, {"good", dn.good},
                         {"degenerate", dn.degenerate}, {"starshaped", dn.starshaped}, {"flag", dn.flag}});
  return Json{{"nodes", nodes},
              {"good_fraction", number(drop.good_fraction)},
              {"inflation_max", number(drop.inflation_max)},
              {"root_n_star", number(drop.root_n_star)},
              {"excluded", drop.excluded},
              {"starshape_violations", drop.starshape_violations},
              {"descendants", drops}};
}

std::vector<NodeData> parse_nodal(const Json& j, std::size_t nodes) {
  if (!j.contains("nodes") || !j["nodes"].is_array()) throw ConfigError("nodal report lacks a node list");
  std::vector<NodeData> out(nodes);
  std::vector<bool> seen(nodes, false);
  for (const Json& n : j["nodes"]) {
    const auto idx = n.at("node").get<std::size_t>();
    if (idx >= nodes) throw ConfigError("nodal report refers to a node outside the tree");
    out[idx].translate = verdict_from_string(n.at("verdict").get<std::string>());
    if (!n.at("doubling").is_null()) {
      out[idx].n = n["doubling"].get<double>();
      out[idx].has_n = true;
    }
    seen[idx] = true;
  }
  for (bool s : seen)
    if (!s) throw ConfigError("nodal report misses a tree node");
  return out;
}

Json to_json(const PipelineResult& r, int d) {
  Json j;
  j["solve"] = Json{{"unknowns", r.unknowns}, {"iterations", r.iterations}, {"residual", number(r.solver_residual)}};
  j["whitney"] = to_json(r.certificate);
  j["whitney"]["cuboids"] = r.cuboids;
  j["whitney"]["root_side"] = number(r.tree.root().q.side);
  j["whitney"]["root_center"] = to_json(r.tree.root().q.center, d);
  j["whitney"]["tree_nodes"] = r.tree.nodes.size();
  j["nodal"] = nodal_report(r.tree, r.node_data, r.translates, r.drop);
  j["delta0_empirical"] = number(r.delta0_emp);
  j["params"] = to_json(r.params);
  Json balls = Json::array();
  for (const AnchorBall& ab : r.balls) {
    Json b{{"anchor", to_json(ab.anchor, d)}, {"found", ab.ball.found}};
    if (ab.ball.found) {
      b["center"] = to_json(ab.ball.y, d);
      b["radius"] = number(ab.ball.rho);
      b["verdict"] = to_string(ab.ball.classification.verdict);
      b["margin"] = number(ab.ball.classification.margin);
    }
    balls.push_back(b);
  }
  j["balls"] = balls;
  j["ball_scale"] = number(r.scale);
  Json index = Json::array();
  for (std::size_t s = 0; s < r.index.steps.size(); ++s)
    for (int id : r.index.steps[s]) {
      const auto u = static_cast<std::size_t>(id);
      index.push_back(Json{{"step", s}, {"node", id}, {"n_prime", number(r.index.n_prime[u])},
                           {"good", static_cast<bool>(r.index.good[u])}, {"case_a", static_cast<bool>(r.index.case_a[u])},
                           {"goodness", number(r.index.goodness[u])}, {"survivor", static_cast<bool>(r.index.survivor[u])}});
    }
  j["index"] = Json{{"root_value", number(r.index.root_value)}, {"nodes", index},
                    {"undetermined", r.index.undetermined}, {"audit_checked", r.index.audit_checked},
                    {"audit_failures", r.index.audit_failures}};
  Json residual = Json::array();
  for (const Vec& p : r.residual) residual.push_back(to_json(p, d - 1));
  j["residual"] = Json{{"samples", r.residual_samples}, {"points", residual}, {"box_counts", to_json(r.residual_counts)}};
  j["slope"] = number(r.slope);
  j["theoretical_comparator"] = number(r.bound);
  j["asserted"] = r.asserted;
  j["pass"] = r.pass;
  return j;
}

std::string simulation_csv(const SimulationReport& rep) {
  std::string out = "depth,survivors,exact_tail,stirling_bound\n";
  char buf[256];
  for (const SimulationDepth& d : rep.depths) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", d.depth, d.survivors, d.exact_tail, d.stirling_bound);
    out += buf;
  }
  return out;
}

std::string dump_line(const Json& j) { return j.dump() + "\n"; }

void write_text(const std::string& path, const std::string& text, bool append) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace uclab
