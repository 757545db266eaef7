#include "uclab/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include "uclab/config.hpp"
#include "uclab/dimension.hpp"
#include "uclab/error.hpp"
#include "uclab/frequency.hpp"
#include "uclab/pipeline.hpp"
#include "uclab/report.hpp"
#include "uclab/solver.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Cases on the unit half-disc; grid n^2 means spacing 2/(n-1).
struct Case {
  std::string label;
  GraphDomain domain;
  AnalyticSolution data;
  double k = 0.0;  // homogeneity degree, 0 when not homogeneous
};

Case make_case(const std::string& label) {
  if (label == "wedge") return {label, GraphDomain::wedge(2, M_PI / 2.0), analytic_library("wedge_harmonic", {M_PI / 2.0}), 2.0};
  if (label == "mix") {
    const AnalyticSolution a = analytic_library("halfplane_harmonic", {1.0, 2.0});
    const AnalyticSolution b = analytic_library("halfplane_harmonic", {2.0, 2.0});
    return {label, GraphDomain::halfplane(2), combine(a, 1.0, b, 2.0), 0.0};
  }
  const double k = std::stod(label.substr(1));
  return {label, GraphDomain::halfplane(2), analytic_library("halfplane_harmonic", {k, 2.0}), k};
}

struct Measured {
  std::vector<double> r;
  std::vector<double> doubling;
  std::vector<double> freq;
  double seconds = 0.0;
};

class SolutionCache {
 public:
  const Measured& get(const std::string& label, int n) {
    const auto key = std::make_pair(label, n);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const auto t0 = Clock::now();
    const Case c = make_case(label);
    const MatrixField a = MatrixField::identity(2);
    const GridSolution sol = solve(c.domain, a, Ball{{0.0, 0.0, 0.0}, 1.0}, c.data.u, 2.0 / (n - 1));
    Measured m;
    m.r = geometric_grid(0.05, 0.2);
    const NormalizedProblem p = normalize(a, c.domain, sol, Vec{});
    m.freq = frequency(p, m.r).N;
    for (double r : m.r) m.doubling.push_back(doubling_index(sol, a, c.domain, Vec{}, r));
    m.seconds = seconds_since(t0);
    return cache_.emplace(key, std::move(m)).first->second;
  }

 private:
  std::map<std::pair<std::string, int>, Measured> cache_;
};

double max_decrease(const std::vector<double>& v) {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) worst = std::max(worst, v[i] - v[i + 1]);
  return worst;
}

CriterionResult homogeneity(SolutionCache& cache) {
  CriterionResult res{1, "homogeneity oracle", true, ""};
  std::ostringstream os;
  for (int k = 1; k <= 3; ++k) {
    const Measured& m = cache.get("k" + std::to_string(k), 513);
    double rel_n = 0.0, rel_f = 0.0;
    for (std::size_t i = 0; i < m.r.size(); ++i) {
      rel_n = std::max(rel_n, std::abs(m.doubling[i] / ((2.0 * k + 2.0) * std::log(2.0)) - 1.0));
      rel_f = std::max(rel_f, std::abs(m.freq[i] / k - 1.0));
    }
    const bool ok = rel_n <= 0.05 && rel_f <= 0.03 && m.seconds <= 60.0;
    res.pass = res.pass && ok;
    os << " k=" << k << " relN=" << fmt("%.2e", rel_n) << " relFreq=" << fmt("%.2e", rel_f)
       << (m.seconds <= 60.0 ? "" : " (over 60 s)");
  }
  res.detail = os.str() + " (tol 5%, 3%)";
  return res;
}

CriterionResult wedge(SolutionCache& cache) {
  CriterionResult res{2, "wedge oracle", true, ""};
  const Measured& m = cache.get("wedge", 513);
  double rel_n = 0.0, rel_f = 0.0;
  for (std::size_t i = 0; i < m.r.size(); ++i) {
    rel_n = std::max(rel_n, std::abs(m.doubling[i] / (6.0 * std::log(2.0)) - 1.0));
    rel_f = std::max(rel_f, std::abs(m.freq[i] / 2.0 - 1.0));
  }
  res.pass = rel_n <= 0.05 && rel_f <= 0.03;
  res.detail = " relN=" + fmt("%.2e", rel_n) + " relFreq=" + fmt("%.2e", rel_f) + " (tol 5%, 3%)";
  return res;
}

CriterionResult monotonicity(SolutionCache& cache) {
  // Violations below the floor are quadrature roundoff on exactly
  // homogeneous data and are not required to halve.
  constexpr double kTol = 0.02;
  constexpr double kFloor = 1e-6;
  CriterionResult res{3, "monotonicity", true, ""};
  std::ostringstream os;
  for (const char* label : {"k1", "k2", "k3", "wedge", "mix"}) {
    const Measured& coarse = cache.get(label, 257);
    const Measured& fine = cache.get(label, 513);
    const double v257 = std::max(max_decrease(coarse.doubling), max_decrease(coarse.freq));
    const double v513 = std::max(max_decrease(fine.doubling), max_decrease(fine.freq));
    const bool ok = v513 <= kTol && (v513 <= 0.5 * v257 || v513 <= kFloor);
    res.pass = res.pass && ok;
    os << " " << label << ":" << fmt("%.1e", v257) << "->" << fmt("%.1e", v513);
  }
  res.detail = os.str() + " (tol 0.02, halving or below 1e-6)";
  return res;
}

CriterionResult affine_invariance() {
  CriterionResult res{4, "affine invariance", true, ""};
  Mat a = Mat::identity(2);
  a(0, 0) = 4.0;
  const MatrixField field = MatrixField::constant(a);
  const GraphDomain dom = GraphDomain::halfplane(2);
  const AnalyticSolution u = analytic_library("constant_coefficient_affine_image", {2.0, 2.0, 0.0, 1.0});
  const GridSolution sol = solve(dom, field, Ball{{0.0, 0.0, 0.0}, 1.0}, u.u, 1.0 / 256.0);
  const NormalizedProblem pa = normalize(field, dom, u.u, u.grad, Vec{0.1, 0.0, 0.0});
  const NormalizedProblem pg = normalize(field, dom, sol, Vec{0.1, 0.0, 0.0});
  double worst = 0.0;
  for (double r : {0.05, 0.1, 0.2}) {
    const double da = J(u.u, field, dom, Vec{0.1, 0.0, 0.0}, r).value;
    const double na = J_normalized(pa, r).value;
    const double dg = J(sol, field, dom, Vec{0.1, 0.0, 0.0}, r).value;
    const double ng = J_normalized(pg, r).value;
    worst = std::max({worst, std::abs(da / na - 1.0), std::abs(dg / ng - 1.0)});
  }
  res.pass = worst <= 1e-2;
  res.detail = " max relative gap " + fmt("%.2e", worst) + " (tol 1e-2)";
  return res;
}

CriterionResult whitney() {
  CriterionResult res{5, "Whitney certification", true, ""};
  const auto t0 = Clock::now();
  const Ball ball{{0.0, 0.0, 0.0}, 1.0};
  std::ostringstream os;
  const std::vector<std::pair<std::string, GraphDomain>> domains = {
      {"halfplane", GraphDomain::halfplane(2)},
      {"wedge", GraphDomain::wedge(2, M_PI / 2.0)},
      {"sawtooth", GraphDomain::sawtooth(2, 0.5, 6, SawtoothProfile::Scallop)}};
  for (const auto& [label, dom] : domains) {
    const TreeBuild tb = decompose_for_tree(dom, ball, ball, 2.0, 6);
    const WhitneyCertificate& c = tb.dec.certificate;
    // 10Q inside keeps the boundary 4.5 sides away; WQ meeting it bounds the gap by its half-diagonal.
    const double s = tb.dec.stretch();
    const double hi = tb.dec.W / 2.0 * std::sqrt(1.0 + s * s);
    const bool dist_ok = c.dist_ratio_min >= 4.5 && c.dist_ratio_max <= hi;
    const bool exact = partition_exact(tb.tree);
    res.pass = res.pass && c.pass() && dist_ok && exact;
    os << " " << label << ": cuboids=" << tb.dec.cuboids.size() << " i/ii/iii=" << c.inside << c.touches
       << c.bounded_overlap << " D0=" << c.d0 << " dist/side=[" << fmt("%.3g", c.dist_ratio_min) << ","
       << fmt("%.3g", c.dist_ratio_max) << "] partition=" << exact;
  }
  const bool fast = seconds_since(t0) <= 30.0;
  res.pass = res.pass && fast;
  res.detail = os.str() + (fast ? " (within 30 s)" : " (over 30 s)");
  return res;
}

CriterionResult combinatorics() {
  CriterionResult res{6, "combinatorics exact", true, ""};
  const double alpha = alpha_from_delta0(0.25);
  const double eps0 = eps0_from_alpha(0.1);
  const double z = rate_z(0.25, 0.25);
  const double a10 = binomial_tail_exact(10, 0.2, 0.25);
  bool ratio = true;
  std::size_t checked = 0;
  for (auto [p, q] : std::vector<std::pair<long long, long long>>{{1, 20}, {1, 10}, {3, 20}, {1, 5}}) {
    const RatioInequalityReport r = ratio_inequality_exact(200, p, q);
    ratio = ratio && r.holds;
    checked += r.checked;
  }
  const bool ok_alpha = alpha == 0.1;
  const bool ok_eps = std::abs(eps0 - (std::exp2(1.0 / 9.0) - 1.0)) <= 1e-12;
  const bool ok_z = std::abs(z - 1.0) <= 1e-12;
  const bool ok_a = std::abs(a10 - 0.525593) <= 1e-6;
  res.pass = ok_alpha && ok_eps && ok_z && ok_a && ratio;
  res.detail = " alpha=" + fmt("%.17g", alpha) + " eps0=" + fmt("%.12f", eps0) + " z=" + fmt("%.15f", z) +
               " A10=" + fmt("%.7f", a10) + " ratio inequality " + (ratio ? "holds" : "fails") + " on " +
               std::to_string(checked) + " pairs";
  return res;
}

CriterionResult stirling() {
  CriterionResult res{7, "Stirling bound", true, ""};
  double worst = 0.0;
  for (double beta : {0.05, 0.1, 0.15})
    for (int j = 50; j <= 500; ++j) worst = std::max(worst, binomial_tail_bound(j, beta, 0.25).ratio);
  res.pass = worst <= 4.0;
  res.detail = " max exact/bound=" + fmt("%.4f", worst) + " (tol 4)";
  return res;
}

SimulationReport standard_simulation() {
  CombinatorialParams p;
  p.delta0 = 0.25;
  p.K = 4;
  p.d = 2;
  SimulationOptions o;
  o.depth = 8;
  o.trials = 1000;
  o.seed = 7;
  return branching_simulate(p, o);
}

CriterionResult simulation() {
  CriterionResult res{8, "branching simulation", true, ""};
  const auto t0 = Clock::now();
  const SimulationReport rep = standard_simulation();
  bool within = true;
  double worst = 0.0;
  for (const SimulationDepth& d : rep.depths) {
    within = within && d.within_3sigma;
    if (d.sigma > 0.0) worst = std::max(worst, std::abs(d.fraction - d.exact_tail) / d.sigma);
  }
  const bool fast = seconds_since(t0) <= 120.0;
  res.pass = within && rep.slope <= rep.bound + 0.05 && fast;
  res.detail = " max |frac-exact|/sigma=" + fmt("%.3f", worst) + " slope=" + fmt("%.4f", rep.slope) +
               " bound+0.05=" + fmt("%.4f", rep.bound + 0.05) + (fast ? "" : " (over 120 s)");
  return res;
}

CriterionResult box_counting() {
  CriterionResult res{9, "box-count calibration", true, ""};
  std::vector<int> levels;
  for (int l = 1; l <= 10; ++l) levels.push_back(l);
  std::vector<std::array<long long, 2>> cantor;
  for (int i = 0; i < 1024; ++i) {
    long long v = 0, pw = 1;
    for (int b = 0; b < 10; ++b) {
      if ((i >> b) & 1) v += 2 * pw;
      pw *= 3;
    }
    cantor.push_back({v, 0});
  }
  const double s_cantor = box_count_cells(cantor, 1, 3, 10, levels).slope;
  std::vector<std::array<long long, 2>> full1, full2;
  for (long long i = 0; i < 1024; ++i) full1.push_back({i, 0});
  std::vector<int> lv2{1, 2, 3, 4, 5, 6, 7};
  for (long long i = 0; i < 128; ++i)
    for (long long j = 0; j < 128; ++j) full2.push_back({i, j});
  const double s_full1 = box_count_cells(full1, 1, 2, 10, levels).slope;
  const double s_full2 = box_count_cells(full2, 2, 2, 7, lv2).slope;
  std::vector<double> sides;
  for (int l = 1; l <= 10; ++l) sides.push_back(std::exp2(-l));
  const double s_point = box_count_points({Vec{0.3, 0.7, 0.0}}, 2, Vec{}, sides).slope;
  res.pass = std::abs(s_cantor - std::log(2.0) / std::log(3.0)) <= 0.02 && std::abs(s_full1 - 1.0) <= 0.01 &&
             std::abs(s_full2 - 2.0) <= 0.01 && std::abs(s_point) <= 0.01;
  res.detail = " cantor=" + fmt("%.4f", s_cantor) + " cube(d=2)=" + fmt("%.4f", s_full1) + " cube(d=3)=" +
               fmt("%.4f", s_full2) + " point=" + fmt("%.4f", s_point);
  return res;
}

PipelineSpec sanity_spec() {
  PipelineSpec s;
  s.domain = GraphDomain::halfplane(2);
  s.a = MatrixField::identity(2);
  s.data = analytic_library("halfplane_harmonic", {2.0, 2.0});
  s.h = 1.0 / 512.0;
  s.depth = 2;
  s.params.K = 1;
  s.params.delta0 = 0.25;
  s.params.eps = 0.05;
  s.params.n0 = 2.0;
  return s;
}

CriterionResult pipeline(const PipelineResult& r) {
  CriterionResult res{10, "pipeline sanity", true, ""};
  std::size_t tested = 0, covered = 0;
  bool clear_of_zero = true;
  for (const AnchorBall& ab : r.balls) {
    if (ab.ball.found) clear_of_zero = clear_of_zero && std::abs(ab.ball.y[0]) >= ab.ball.rho * (1.0 - 1e-12);
    if (std::abs(ab.anchor[0]) <= r.scale / 8.0) continue;
    ++tested;
    if (ab.ball.found) ++covered;
  }
  res.pass = r.slope <= 0.1 && tested > 0 && covered == tested && clear_of_zero;
  res.detail = " residual points=" + std::to_string(r.residual.size()) + " slope=" + fmt("%.4f", r.slope) +
               " anchors with balls " + std::to_string(covered) + "/" + std::to_string(tested) +
               (clear_of_zero ? " balls avoid x1=0" : " a ball meets x1=0");
  return res;
}

CriterionResult determinism(const std::string& first) {
  CriterionResult res{11, "determinism", true, ""};
  const std::string second = dump_line(to_json(theorem_pipeline(sanity_spec()), 2)) +
                             simulation_csv(standard_simulation());
  res.pass = first == second;
  res.detail = std::string(" repeated pipeline report and simulation CSV ") + (res.pass ? "identical" : "differ") +
               " (" + std::to_string(first.size()) + " bytes, hash " + hex_hash(fnv1a(first)) + ")";
  return res;
}

void emit(std::ostream& out, const CriterionResult& r) {
  out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.id << " " << r.name << ":" << r.detail << "\n";
  out.flush();
}

template <typename F>
CriterionResult guarded(int id, const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return CriterionResult{id, name, false, std::string(" error: ") + e.what()};
  }
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& out) {
  std::vector<CriterionResult> results;
  SolutionCache cache;
  auto run = [&](CriterionResult r) {
    emit(out, r);
    results.push_back(std::move(r));
  };
  run(guarded(1, "homogeneity oracle", [&] { return homogeneity(cache); }));
  run(guarded(2, "wedge oracle", [&] { return wedge(cache); }));
  run(guarded(3, "monotonicity", [&] { return monotonicity(cache); }));
  run(guarded(4, "affine invariance", [&] { return affine_invariance(); }));
  run(guarded(5, "Whitney certification", [&] { return whitney(); }));
  run(guarded(6, "combinatorics exact", [&] { return combinatorics(); }));
  run(guarded(7, "Stirling bound", [&] { return stirling(); }));
  run(guarded(8, "branching simulation", [&] { return simulation(); }));
  run(guarded(9, "box-count calibration", [&] { return box_counting(); }));
  std::string first;
  run(guarded(10, "pipeline sanity", [&] {
    const PipelineResult r = theorem_pipeline(sanity_spec());
    first = dump_line(to_json(r, 2)) + simulation_csv(standard_simulation());
    return pipeline(r);
  }));
  run(guarded(11, "determinism", [&] { return determinism(first); }));
  return results;
}

}  // namespace uclab
