#include "uclab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "uclab/dimension.hpp"
#include "uclab/error.hpp"

namespace uclab {

namespace {

std::string trim(std::string s) {
  const auto cut = s.find_first_of(";#");
  if (cut != std::string::npos) s.erase(cut);
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("key '" + key + "' expects an integer");
  return static_cast<int>(x);
}

Vec to_vec(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  Vec out{0.0, 0.0, 0.0};
  std::string tok;
  std::size_t i = 0;
  while (is >> tok) {
    if (i == 3) throw ConfigError("key '" + key + "' takes at most three components");
    out[i++] = to_double(key, tok);
  }
  if (i == 0) throw ConfigError("key '" + key + "' is empty");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto str = [&](const char* k, std::string RunConfig::*m) {
      t[k] = [m](RunConfig& c, const std::string&, const std::string& v) { c.*m = v; };
    };
    auto num = [&](const char* k, double RunConfig::*m) {
      t[k] = [m](RunConfig& c, const std::string& key, const std::string& v) { c.*m = to_double(key, v); };
    };
    auto integer = [&](const char* k, int RunConfig::*m) {
      t[k] = [m](RunConfig& c, const std::string& key, const std::string& v) { c.*m = to_int(key, v); };
    };
    auto vec = [&](const char* k, Vec RunConfig::*m) {
      t[k] = [m](RunConfig& c, const std::string& key, const std::string& v) { c.*m = to_vec(key, v); };
    };
    str("domain.family", &RunConfig::family);
    integer("domain.d", &RunConfig::d);
    num("domain.theta", &RunConfig::theta);
    num("domain.amplitude", &RunConfig::amplitude);
    integer("domain.levels", &RunConfig::levels);
    str("domain.profile", &RunConfig::profile);
    str("domain.modulus", &RunConfig::modulus);
    num("domain.modulus_amplitude", &RunConfig::modulus_amplitude);
    num("domain.modulus_exponent", &RunConfig::modulus_exponent);
    num("domain.r0", &RunConfig::r0);
    str("coefficients.kind", &RunConfig::coefficients);
    num("coefficients.a11", &RunConfig::a11);
    num("coefficients.a12", &RunConfig::a12);
    num("coefficients.a13", &RunConfig::a13);
    num("coefficients.a22", &RunConfig::a22);
    num("coefficients.a23", &RunConfig::a23);
    num("coefficients.a33", &RunConfig::a33);
    vec("coefficients.eps", &RunConfig::eps);
    vec("coefficients.wave", &RunConfig::wave);
    num("solver.ball_radius", &RunConfig::ball_radius);
    vec("solver.ball_center", &RunConfig::ball_center);
    num("solver.h", &RunConfig::h);
    num("solver.tol", &RunConfig::tol);
    integer("solver.max_iterations", &RunConfig::max_iterations);
    str("solver.data", &RunConfig::data);
    num("tree.M0", &RunConfig::m0);
    num("tree.kappa", &RunConfig::kappa);
    num("tree.W", &RunConfig::W);
    integer("tree.depth", &RunConfig::depth);
    integer("tree.K", &RunConfig::K);
    num("tree.S", &RunConfig::S);
    str("combinatorial.delta0", &RunConfig::delta0);
    num("combinatorial.N0", &RunConfig::n0);
    str("combinatorial.eps", &RunConfig::eps_mode);
    num("nodal.eta", &RunConfig::eta);
    t["run.seed"] = [](RunConfig& c, const std::string& key, const std::string& v) {
      try {
        std::size_t used = 0;
        c.seed = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
      } catch (const std::logic_error&) {
        throw ConfigError("key '" + key + "' expects an unsigned integer");
      }
    };
    return t;
  }();
  return table;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("top-level key '" + section + "' must sit inside a section");
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const auto it = setters().find(full);
      if (it == setters().end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(cfg, full, trim(node.get_value<std::string>()));
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& c) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  need(c.family == "halfplane" || c.family == "wedge" || c.family == "sawtooth", "domain.family must be halfplane, wedge or sawtooth");
  need(c.d == 2 || c.d == 3, "domain.d must be 2 or 3");
  need(c.theta > 0.0 && c.theta < M_PI, "domain.theta must lie in (0, pi)");
  need(c.amplitude >= 0.0, "domain.amplitude must be nonnegative");
  need(c.levels >= 1 && c.levels <= 30, "domain.levels must lie in [1, 30]");
  need(c.profile == "scallop" || c.profile == "triangle", "domain.profile must be scallop or triangle");
  need(c.modulus == "zero" || c.modulus == "power", "domain.modulus must be zero or power");
  need(c.modulus_amplitude >= 0.0 && c.modulus_exponent > 0.0 && c.r0 > 0.0, "modulus parameters out of range");
  need(c.coefficients == "identity" || c.coefficients == "constant" || c.coefficients == "modulated",
       "coefficients.kind must be identity, constant or modulated");
  for (double e : c.eps) need(e >= 0.0 && e < 1.0, "coefficients.eps entries must lie in [0, 1)");
  need(c.ball_radius > 0.0, "solver.ball_radius must be positive");
  need(c.h > 0.0 && c.h < c.ball_radius, "solver.h must lie in (0, ball_radius)");
  need(c.tol > 0.0 && c.tol < 1.0, "solver.tol must lie in (0, 1)");
  need(c.max_iterations >= 1, "solver.max_iterations must be positive");
  need(c.m0 > 0.0, "tree.M0 must be positive");
  need(c.kappa >= 10.0, "tree.kappa must be at least 10");
  need(c.W == 0.0 || c.W >= 2.0 * c.kappa + 1.0, "tree.W must be 0 or at least 2 kappa + 1");
  need(c.depth >= 0 && c.depth <= 12, "tree.depth must lie in [0, 12]");
  need(c.K >= 1, "tree.K must be at least 1");
  need(c.S >= 1.0, "tree.S must be at least 1");
  if (c.delta0 != "empirical") {
    const double v = to_double("combinatorial.delta0", c.delta0);
    need(v > 0.0 && v < 1.0, "combinatorial.delta0 must lie in (0, 1)");
  }
  need(c.n0 > 1.0, "combinatorial.N0 must exceed 1");
  const double eps = c.eps_mode == "from-S" ? 1.0 / c.S : to_double("combinatorial.eps", c.eps_mode);
  need(eps > 0.0, "combinatorial.eps must be positive");
  // With an empirical delta0 the bound on eps is only known after the run.
  if (c.delta0 != "empirical") {
    const double bound = eps0_from_alpha(alpha_from_delta0(to_double("combinatorial.delta0", c.delta0)));
    need(eps < bound, "combinatorial.eps must be below eps0(alpha(delta0)); from-S uses 1/S");
  }
  need(c.eta > 0.0 && c.eta < 1.0, "nodal.eta must lie in (0, 1)");
  make_data(c.data, c.d);
}

std::string canonical_json(const RunConfig& c) {
  nlohmann::json j;
  j["domain"] = {{"family", c.family}, {"d", c.d}, {"theta", c.theta}, {"amplitude", c.amplitude},
                 {"levels", c.levels}, {"profile", c.profile}, {"modulus", c.modulus},
                 {"modulus_amplitude", c.modulus_amplitude}, {"modulus_exponent", c.modulus_exponent}, {"r0", c.r0}};
  j["coefficients"] = {{"kind", c.coefficients}, {"a11", c.a11}, {"a12", c.a12}, {"a13", c.a13}, {"a22", c.a22},
                       {"a23", c.a23}, {"a33", c.a33}, {"eps", c.eps}, {"wave", c.wave}};
  j["solver"] = {{"ball_radius", c.ball_radius}, {"ball_center", c.ball_center}, {"h", c.h}, {"tol", c.tol},
                 {"max_iterations", c.max_iterations}, {"data", c.data}};
  j["tree"] = {{"M0", c.m0}, {"kappa", c.kappa}, {"W", c.W}, {"depth", c.depth}, {"K", c.K}, {"S", c.S}};
  j["combinatorial"] = {{"delta0", c.delta0}, {"N0", c.n0}, {"eps", c.eps_mode}};
  j["nodal"] = {{"eta", c.eta}};
  j["run"] = {{"seed", c.seed}};
  return j.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) { return fnv1a(canonical_json(cfg)); }

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GraphDomain make_domain(const RunConfig& c) {
  const Modulus mod = c.modulus == "zero" ? Modulus::zero(c.r0) : Modulus::power(c.modulus_amplitude, c.modulus_exponent, c.r0);
  if (c.family == "halfplane") return GraphDomain::halfplane(c.d, mod);
  if (c.family == "wedge") return GraphDomain::wedge(c.d, c.theta, mod);
  return GraphDomain::sawtooth(c.d, c.amplitude, c.levels,
                               c.profile == "scallop" ? SawtoothProfile::Scallop : SawtoothProfile::Triangle, mod);
}

MatrixField make_coefficients(const RunConfig& c) {
  if (c.coefficients == "identity") return MatrixField::identity(c.d);
  if (c.coefficients == "constant") {
    Mat a = Mat::identity(c.d);
    a(0, 0) = c.a11;
    a(0, 1) = a(1, 0) = c.a12;
    a(1, 1) = c.a22;
    if (c.d == 3) {
      a(0, 2) = a(2, 0) = c.a13;
      a(1, 2) = a(2, 1) = c.a23;
      a(2, 2) = c.a33;
    }
    return MatrixField::constant(a);
  }
  Mat waves = Mat::identity(c.d);
  for (int i = 0; i < c.d; ++i)
    for (int j = 0; j < c.d; ++j) waves(i, j) = c.wave[static_cast<std::size_t>(j)];
  return MatrixField::modulated(Mat::identity(c.d), c.eps, waves);
}

AnalyticSolution make_data(const std::string& expr, int d) {
  std::vector<std::string> terms;
  std::string cur;
  for (char ch : expr) {
    if (ch == '+') {
      terms.push_back(cur);
      cur.clear();
    } else if (ch != ' ' && ch != '\t') {
      cur += ch;
    }
  }
  terms.push_back(cur);
  AnalyticSolution total;
  bool first = true;
  for (const std::string& term : terms) {
    if (term.empty()) throw ConfigError("empty term in data expression '" + expr + "'");
    double coef = 1.0;
    std::string body = term;
    if (const auto star = term.find('*'); star != std::string::npos) {
      coef = to_double("solver.data", term.substr(0, star));
      body = term.substr(star + 1);
    }
    std::string name = body;
    std::vector<double> params;
    if (const auto colon = body.find(':'); colon != std::string::npos) {
      name = body.substr(0, colon);
      std::string rest = body.substr(colon + 1);
      std::istringstream is(rest);
      std::string tok;
      while (std::getline(is, tok, ',')) params.push_back(to_double("solver.data", tok));
    }
    if (name == "halfplane_harmonic" && params.size() < 2) {
      if (params.empty()) params.push_back(1.0);
      params.push_back(static_cast<double>(d));
    }
    const AnalyticSolution s = analytic_library(name, params);
    total = first ? combine(s, coef, s, 0.0) : combine(total, 1.0, s, coef);
    first = false;
  }
  return total;
}

PipelineSpec make_spec(const RunConfig& c) {
  PipelineSpec s;
  s.domain = make_domain(c);
  s.a = make_coefficients(c);
  s.data = make_data(c.data, c.d);
  s.ball = Ball{c.ball_center, c.ball_radius};
  s.h = c.h;
  s.solve.tol = c.tol;
  s.solve.max_iterations = c.max_iterations;
  s.m0 = c.m0;
  s.depth = c.depth;
  s.S = c.S;
  s.whitney.kappa = c.kappa;
  s.whitney.W = c.W;
  s.params.delta0 = c.delta0 == "empirical" ? 0.25 : std::stod(c.delta0);
  s.delta0_empirical = c.delta0 == "empirical";
  s.params.n0 = c.n0;
  s.params.K = c.K;
  s.params.d = c.d;
  s.eps_from_s = c.eps_mode == "from-S";
  s.params.eps = s.eps_from_s ? 1.0 / c.S : std::stod(c.eps_mode);
  s.nodal.eta = c.eta;
  return s;
}

}  // namespace uclab
