#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "uclab/acceptance.hpp"
#include "uclab/config.hpp"
#include "uclab/dimension.hpp"
#include "uclab/error.hpp"
#include "uclab/frequency.hpp"
#include "uclab/nodal.hpp"
#include "uclab/parallel.hpp"
#include "uclab/pipeline.hpp"
#include "uclab/report.hpp"
#include "uclab/solver.hpp"
#include "uclab/whitney.hpp"

using namespace uclab;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

struct Common {
  std::string config;
  std::string out;
  bool append = false;
};

RunConfig config_or_default(const std::string& path) { return path.empty() ? RunConfig{} : load_config(path); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty())
    std::cout << text;
  else
    write_text(c.out, text, c.append);
}

GridSolution load_solution(const std::string& path, const GraphDomain& domain) {
  GridSolution sol = read_checkpoint(path);
  if (sol.domain_hash != domain.hash()) throw ConfigError("solution '" + path + "' was computed on a different domain");
  return sol;
}

int cmd_solve(const Common& c) {
  const RunConfig cfg = load_config(c.config);
  const PipelineSpec spec = make_spec(cfg);
  GridSolution sol = solve(spec.domain, spec.a, spec.ball, spec.data.u, spec.h, spec.solve);
  sol.config_json = canonical_json(cfg);
  if (c.out.empty()) throw ConfigError("solve needs --out for the checkpoint");
  write_checkpoint(sol, c.out);
  Json j = report_header("solve", cfg);
  j["unknowns"] = sol.unknown_count();
  j["iterations"] = sol.iterations;
  j["residual"] = sol.residual;
  j["checkpoint"] = c.out;
  std::cout << dump_line(j);
  return kOk;
}

Vec parse_point(const std::string& text, int d) {
  std::string t = text;
  for (char& ch : t)
    if (ch == ',') ch = ' ';
  std::istringstream is(t);
  Vec x{};
  int i = 0;
  for (double v; i < 3 && is >> v; ++i) x[static_cast<std::size_t>(i)] = v;
  if (i != d || !is.eof()) throw ConfigError("--center expects " + std::to_string(d) + " coordinates, got '" + text + "'");
  return x;
}

// "rmin:rmax" gives the default 2^(1/4) grid; "rmin:rmax:count" a geometric grid with count points.
std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw ConfigError("--radii expects rmin:rmax[:count], got '" + text + "'");
    }
  }
  if (v.size() < 2 || v.size() > 3 || !(v[0] > 0.0 && v[1] >= v[0]))
    throw ConfigError("--radii expects 0 < rmin <= rmax, got '" + text + "'");
  if (v.size() == 2) return geometric_grid(v[0], v[1]);
  const int count = static_cast<int>(v[2]);
  if (count < 1 || count != v[2]) throw ConfigError("--radii count must be a positive integer");
  std::vector<double> grid;
  for (int i = 0; i < count; ++i) grid.push_back(count == 1 ? v[0] : v[0] * std::pow(v[1] / v[0], double(i) / (count - 1)));
  return grid;
}

Json constant_json(const EmpiricalConstant& e) {
  return Json{{"c_emp", e.c_emp}, {"max_drop", e.max_drop}, {"pass", e.pass}};
}

int cmd_frequency(const Common& c, const std::string& sol_path, const std::string& center, const std::string& radii,
                  const std::string& csv) {
  const RunConfig cfg = config_or_default(c.config);
  const GraphDomain domain = make_domain(cfg);
  const MatrixField a = make_coefficients(cfg);
  const GridSolution sol = load_solution(sol_path, domain);
  const Vec x0 = parse_point(center, cfg.d);
  const std::vector<double> grid = parse_radii(radii);
  const NormalizedProblem p = normalize(a, domain, sol, x0);
  const FrequencyCurves curves = frequency(p, grid);
  const MassFunction mass = mass_function(sol, a, domain);
  const double gamma = a.lipschitz();

  Json j = report_header("frequency", cfg);
  j["center"] = to_json(x0, cfg.d);
  j["curves"] = to_json(curves);
  bool ok = true;
  try {
    StarshapeGuard guard;
    guard.domain = &domain;
    guard.a = &a;
    const EmpiricalConstant mono = check_almost_monotonicity(mass, x0, grid, gamma, 0.02, guard);
    Json dbl = Json::array();
    for (std::size_t i = 0; i < mono.radii.size(); ++i) dbl.push_back(Json{{"r", mono.radii[i]}, {"N", mono.n_small[i]}});
    j["doubling"] = dbl;
    j["C_mono"] = constant_json(mono);
    ok = mono.pass;
  } catch (const PreconditionError& e) {
    j["C_mono"] = Json{{"precondition", e.what()}, {"witness", to_json(e.witness(), cfg.d)}};
  }
  if (std::abs(domain.gap(x0)) <= domain.default_tolerance()) {
    try {
      j["C_bdry"] = constant_json(check_boundary_doubling(mass, domain, x0, grid, gamma));
    } catch (const OutOfRangeError& e) {
      j["C_bdry"] = Json{{"error", e.what()}};
    }
  }
  j["log_derivative_defect"] = check_H_logderivative(curves, gamma).max_defect;
  emit(c, dump_line(j));
  if (!csv.empty()) {
    std::string out = "r,N,frequency,H,D\n";
    char buf[160];
    for (std::size_t i = 0; i < curves.r.size(); ++i) {
      const double n = doubling_index(sol, a, domain, x0, curves.r[i]);
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", curves.r[i], n, curves.N[i], curves.H[i],
                    curves.D[i]);
      out += buf;
    }
    write_text(csv, out, false);
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_whitney(const Common& c, const std::string& report, int depth) {
  RunConfig cfg = load_config(c.config);
  if (depth >= 0) {
    cfg.depth = depth;
    validate(cfg);
  }
  const PipelineSpec spec = make_spec(cfg);
  const TreeBuild tb = decompose_for_tree(spec.domain, spec.ball, spec.ball, spec.m0, spec.depth, spec.whitney);
  if (c.out.empty()) throw ConfigError("whitney needs --out for the tree");
  write_text(c.out, serialize_tree(tb.tree), false);
  Json j = report_header("whitney", cfg);
  j["certificate"] = to_json(tb.dec.certificate);
  j["cuboids"] = tb.dec.cuboids.size();
  j["slivers"] = tb.dec.slivers;
  j["uncovered_fraction"] = tb.dec.uncovered_fraction;
  j["partition_exact"] = partition_exact(tb.tree);
  const std::string line = dump_line(j);
  if (report.empty())
    std::cout << line;
  else
    write_text(report, line, c.append);
  return tb.dec.certificate.pass() && partition_exact(tb.tree) ? kOk : kCheckFailed;
}

int cmd_nodal(const Common& c, const std::string& sol_path, const std::string& tree_path) {
  const RunConfig cfg = config_or_default(c.config);
  const PipelineSpec spec = make_spec(cfg);
  const GridSolution sol = load_solution(sol_path, spec.domain);
  const WhitneyTree tree = parse_tree(read_file(tree_path));
  std::vector<NodeData> data(tree.nodes.size());
  std::vector<SignClassification> translates(tree.nodes.size());
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    const Cuboid& q = tree.nodes[i].q;
    try {
      data[i].n = doubling_index(sol, spec.a, spec.domain, spec.domain.lift(q.center), spec.S * q.side, spec.mass);
      data[i].has_n = true;
    } catch (const DegenerateMassError&) {
    }
    const Region region = Region::cuboid(vertical_translate(q, spec.domain), tree.d);
    try {
      translates[i] = classify_sign(sol, region, spec.nodal);
    } catch (const EmptyRegionError&) {
      translates[i].region = region;
    }
    data[i].translate = translates[i].verdict;
  }
  const DropStatistics drop =
      doubling_drop_statistics(sol, spec.a, spec.domain, tree, 0, spec.S, std::min(cfg.K, tree.depth), spec.mass);
  Json j = report_header("nodal", cfg);
  j.update(nodal_report(tree, data, translates, drop));
  emit(c, dump_line(j));
  return kOk;
}

int cmd_dimension(const Common& c, const std::string& tree_path, const std::string& nodal_path) {
  const RunConfig cfg = config_or_default(c.config);
  const PipelineSpec spec = make_spec(cfg);
  const WhitneyTree tree = parse_tree(read_file(tree_path));
  Json nodal;
  try {
    nodal = Json::parse(read_file(nodal_path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed nodal report: ") + e.what());
  }
  const std::vector<NodeData> data = parse_nodal(nodal, tree.nodes.size());
  CombinatorialParams params = spec.params;
  params.d = tree.d;
  if (spec.delta0_empirical) {
    const double g = nodal.value("good_fraction", 0.0);
    if (g > 0.0 && g < 1.0) params.delta0 = g;
  }
  params.validate();
  const TreeIndexState st = modified_index_recursion(tree, data, params);
  Json j = report_header("dimension", cfg);
  j["params"] = to_json(params);
  j["undetermined"] = st.undetermined;
  j["audit_checked"] = st.audit_checked;
  j["audit_failures"] = st.audit_failures;
  Json steps = Json::array();
  for (std::size_t s = 0; s < st.steps.size(); ++s) {
    std::size_t alive = 0;
    for (int id : st.steps[s]) alive += st.survivor[static_cast<std::size_t>(id)];
    steps.push_back(Json{{"step", s}, {"nodes", st.steps[s].size()}, {"survivors", alive}});
  }
  j["steps"] = steps;
  try {
    const BoxCountReport b = survivor_dimension(tree, st, params.K);
    j["box_counts"] = to_json(b);
    j["slope"] = b.slope;
  } catch (const CoverageError&) {
    j["slope"] = 0.0;
  }
  j["theoretical_comparator"] = dimension_bound(params);
  emit(c, dump_line(j));
  return st.audit_failures == 0 ? kOk : kCheckFailed;
}

int cmd_simulate(const Common& c, double delta0, int K, int d, const SimulationOptions& o) {
  if (!(delta0 > 0.0 && delta0 < 1.0)) throw ConfigError("--delta0 must lie in (0, 1)");
  CombinatorialParams p;
  p.delta0 = delta0;
  p.K = K;
  p.d = d;
  if (K < 1 || (d != 2 && d != 3)) throw ConfigError("--K must be positive and --d 2 or 3");
  const SimulationReport rep = branching_simulate(p, o);
  emit(c, simulation_csv(rep));
  return kOk;
}

int cmd_pipeline(const Common& c) {
  const RunConfig cfg = load_config(c.config);
  const PipelineResult r = theorem_pipeline(make_spec(cfg));
  Json j = report_header("pipeline", cfg);
  j.update(to_json(r, cfg.d));
  emit(c, dump_line(j));
  return r.pass ? kOk : kCheckFailed;
}

int cmd_selftest() {
  const auto results = run_acceptance(std::cout);
  for (const auto& r : results)
    if (!r.pass) return kCheckFailed;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uclab: doubling index, Whitney trees and nodal dimension experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  bool deterministic = true;
  app.add_flag("--deterministic,!--no-deterministic", deterministic, "fixed-order reductions (default on)");

  Common common;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", common.config, "INI run configuration");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    else opt->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "output path");
    sub->add_flag("--append", common.append, "append a JSON line instead of overwriting");
  };

  auto* solve_cmd = app.add_subcommand("solve", "solve the Dirichlet problem and write a checkpoint");
  add_common(solve_cmd, true);

  std::string sol_path, tree_path, nodal_path, center = "0,0", radii = "0.05:0.2", csv_path, report_path;
  int tree_depth = -1;
  auto* freq_cmd = app.add_subcommand("frequency", "frequency and doubling index curves at a point");
  add_common(freq_cmd, false);
  freq_cmd->add_option("--sol", sol_path, "checkpoint from solve")->required()->check(CLI::ExistingFile);
  freq_cmd->add_option("--center", center, "centre x,y[,z]");
  freq_cmd->add_option("--radii", radii, "rmin:rmax[:count]");
  freq_cmd->add_option("--csv", csv_path, "CSV of r, N, frequency, H, D");

  auto* whitney_cmd = app.add_subcommand("whitney", "Whitney decomposition and projection tree");
  add_common(whitney_cmd, true);
  whitney_cmd->add_option("--report", report_path, "certificate JSON path");
  whitney_cmd->add_option("--depth", tree_depth, "tree depth, overriding the config");

  auto* nodal_cmd = app.add_subcommand("nodal", "translate verdicts and doubling values per tree node");
  add_common(nodal_cmd, false);
  nodal_cmd->add_option("--sol", sol_path, "checkpoint from solve")->required()->check(CLI::ExistingFile);
  nodal_cmd->add_option("--tree", tree_path, "tree from whitney")->required()->check(CLI::ExistingFile);

  auto* dim_cmd = app.add_subcommand("dimension", "modified index recursion and survivor dimension");
  add_common(dim_cmd, false);
  dim_cmd->add_option("--tree", tree_path, "tree from whitney")->required()->check(CLI::ExistingFile);
  dim_cmd->add_option("--nodal", nodal_path, "report from nodal")->required()->check(CLI::ExistingFile);

  double delta0 = 0.25;
  int K = 4, d = 2;
  std::string mode = "ceil";
  SimulationOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic branching simulation");
  sim_cmd->add_option("--delta0", delta0, "good-children fraction in (0, 1)");
  sim_cmd->add_option("--K", K, "generations per step");
  sim_cmd->add_option("--d", d, "ambient dimension");
  sim_cmd->add_option("--depth", sim.depth, "steps");
  sim_cmd->add_option("--trials", sim.trials, "paths");
  sim_cmd->add_option("--seed", sim.seed, "seed");
  sim_cmd->add_option("--mode", mode, "ceil or floor")->check(CLI::IsMember({"ceil", "floor"}));
  sim_cmd->add_option("--out", common.out, "CSV path");

  auto* pipe_cmd = app.add_subcommand("pipeline", "end-to-end run");
  add_common(pipe_cmd, true);

  auto* self_cmd = app.add_subcommand("selftest", "run the acceptance suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : kConfigError;
  }
  set_deterministic(deterministic);

  try {
    if (*solve_cmd) return cmd_solve(common);
    if (*freq_cmd) return cmd_frequency(common, sol_path, center, radii, csv_path);
    if (*whitney_cmd) return cmd_whitney(common, report_path, tree_depth);
    if (*nodal_cmd) return cmd_nodal(common, sol_path, tree_path);
    if (*dim_cmd) return cmd_dimension(common, tree_path, nodal_path);
    if (*sim_cmd) {
      sim.mode = mode == "floor" ? GoodMode::Floor : GoodMode::Ceil;
      return cmd_simulate(common, delta0, K, d, sim);
    }
    if (*pipe_cmd) return cmd_pipeline(common);
    if (*self_cmd) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kConfigError;
}
