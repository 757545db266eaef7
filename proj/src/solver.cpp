#include "uclab/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>

#include "uclab/error.hpp"
#include "uclab/parallel.hpp"

namespace uclab {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

std::array<int, 3> Mesh::coords(std::size_t idx) const {
  std::array<int, 3> c{};
  c[0] = static_cast<int>(idx % static_cast<std::size_t>(n[0]));
  idx /= static_cast<std::size_t>(n[0]);
  c[1] = static_cast<int>(idx % static_cast<std::size_t>(n[1]));
  c[2] = static_cast<int>(idx / static_cast<std::size_t>(n[1]));
  return c;
}

Vec Mesh::node(const std::array<int, 3>& c) const {
  Vec x{};
  for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = lo[static_cast<std::size_t>(i)] + h * c[static_cast<std::size_t>(i)];
  return x;
}

Vec Mesh::node(std::size_t idx) const { return node(coords(idx)); }

Mesh::CellClass Mesh::classify_cell(const GraphDomain& domain, const Ball& ball, const std::array<int, 3>& c) const {
  bool any_in = false;
  bool any_below = false;
  bool any_outside_ball = false;
  const int corners = 1 << d;
  auto visit = [&](const Vec& x) {
    const bool in_dom = domain.contains(x);
    const bool in_ball = ball.contains(x);
    if (in_dom && in_ball) any_in = true;
    if (!in_dom) any_below = true;
    if (!in_ball) any_outside_ball = true;
  };
  for (int k = 0; k < corners; ++k) {
    std::array<int, 3> q = c;
    for (int i = 0; i < d; ++i) q[static_cast<std::size_t>(i)] += (k >> i) & 1;
    visit(node(q));
  }
  Vec centre = node(c);
  for (int i = 0; i < d; ++i) centre[static_cast<std::size_t>(i)] += 0.5 * h;
  visit(centre);
  if (!any_in) return CellClass::Exterior;
  if (any_below) return CellClass::BoundaryGraph;
  if (any_outside_ball) return CellClass::BoundarySphere;
  return CellClass::Interior;
}

double Mesh::clipped_fraction(const GraphDomain& domain, const Ball& ball, const std::array<int, 3>& c) const {
  const int per = 4;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= per;
  int inside = 0;
  const Vec base = node(c);
  for (int s = 0; s < total; ++s) {
    Vec x = base;
    int code = s;
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] += h * ((code % per) + 0.5) / per;
      code /= per;
    }
    if (domain.contains(x) && ball.contains(x)) ++inside;
  }
  return static_cast<double>(inside) / total;
}

void GridSolution::locate(const Vec& x, std::array<int, 3>& base, std::array<double, 3>& w) const {
  const double slack = 1e-9;
  if (norm(x - ball.center) > ball.radius + mesh.h * (1.0 + slack))
    throw OutOfRangeError("point lies outside the solved region");
  base = {0, 0, 0};
  w = {0.0, 0.0, 0.0};
  for (int i = 0; i < mesh.d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double f = (x[ui] - mesh.lo[ui]) / mesh.h;
    if (f < -slack || f > mesh.n[ui] - 1 + slack) throw OutOfRangeError("point lies outside the solution grid");
    base[ui] = std::clamp(static_cast<int>(std::floor(f)), 0, mesh.n[ui] - 2);
    w[ui] = std::clamp(f - base[ui], 0.0, 1.0);
  }
}

double GridSolution::value(const Vec& x) const {
  std::array<int, 3> base;
  std::array<double, 3> w;
  locate(x, base, w);
  double s = 0.0;
  const int corners = 1 << mesh.d;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::array<int, 3> q = base;
    for (int i = 0; i < mesh.d; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const bool up = (c >> i) & 1;
      weight *= up ? w[ui] : 1.0 - w[ui];
      q[ui] += up;
    }
    if (weight != 0.0) s += weight * values[mesh.index(q[0], q[1], q[2])];
  }
  return s;
}

Vec GridSolution::nodal_gradient(const std::array<int, 3>& c) const {
  Vec g{};
  const std::size_t p = mesh.index(c[0], c[1], c[2]);
  const double h = mesh.h;
  const double u0 = values[p];
  for (int i = 0; i < mesh.d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    auto at = [&](int off, bool& ok) -> double {
      std::array<int, 3> q = c;
      q[ui] += off;
      if (q[ui] < 0 || q[ui] >= mesh.n[ui]) {
        ok = false;
        return 0.0;
      }
      const std::size_t k = mesh.index(q[0], q[1], q[2]);
      ok = valid[k] != 0;
      return values[k];
    };
    bool okp1, okm1, okp2, okm2;
    const double up1 = at(1, okp1);
    const double um1 = at(-1, okm1);
    const double up2 = at(2, okp2);
    const double um2 = at(-2, okm2);
    double gi;
    if (okp1 && okm1) {
      gi = (up1 - um1) / (2.0 * h);
    } else if (okp1 && okp2) {
      gi = (-3.0 * u0 + 4.0 * up1 - up2) / (2.0 * h);
    } else if (okm1 && okm2) {
      gi = (3.0 * u0 - 4.0 * um1 + um2) / (2.0 * h);
    } else if (okp1) {
      gi = (up1 - u0) / h;
    } else if (okm1) {
      gi = (u0 - um1) / h;
    } else {
      gi = (up1 - um1) / (2.0 * h);
    }
    g[ui] = gi;
  }
  return g;
}

Vec GridSolution::gradient(const Vec& x) const {
  std::array<int, 3> base;
  std::array<double, 3> w;
  locate(x, base, w);
  Vec acc{};
  Vec plain{};
  double wsum = 0.0;
  const int corners = 1 << mesh.d;
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::array<int, 3> q = base;
    for (int i = 0; i < mesh.d; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const bool up = (c >> i) & 1;
      weight *= up ? w[ui] : 1.0 - w[ui];
      q[ui] += up;
    }
    if (weight == 0.0) continue;
    const Vec g = nodal_gradient(q);
    plain = plain + weight * g;
    if (valid[mesh.index(q[0], q[1], q[2])]) {
      acc = acc + weight * g;
      wsum += weight;
    }
  }
  if (wsum <= 1e-12) return plain;
  return (1.0 / wsum) * acc;
}

std::size_t GridSolution::unknown_count() const {
  return static_cast<std::size_t>(std::count(kind.begin(), kind.end(), NodeKind::Unknown));
}

Field GridSolution::field() const {
  return [this](const Vec& x) { return value(x); };
}

VecField GridSolution::gradient_field() const {
  return [this](const Vec& x) { return gradient(x); };
}

Vec gradient(const GridSolution& sol, const Vec& x) { return sol.gradient(x); }

namespace {

struct Csr {
  std::vector<std::size_t> row;
  std::vector<std::int64_t> col;
  std::vector<double> val;
  std::vector<double> diag;
};

double harmonic_mean(double a, double b) { return (a + b) == 0.0 ? 0.0 : 2.0 * a * b / (a + b); }

struct Stencil {
  std::vector<std::array<int, 3>> offsets;
  std::vector<double> coeffs;
};

// Row of -div(A grad u) at node c, scaled by h^2.
Stencil stencil_at(const Mesh& mesh, const MatrixField& a, const std::array<int, 3>& c) {
  Stencil s;
  const int d = mesh.d;
  const Vec x = mesh.node(c);
  const Mat ac = a(x);
  double centre = 0.0;
  std::array<Mat, 3> plus{};
  std::array<Mat, 3> minus{};
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    Vec xp = x;
    Vec xm = x;
    xp[ui] += mesh.h;
    xm[ui] -= mesh.h;
    plus[ui] = a(xp);
    minus[ui] = a(xm);
    const double ap = harmonic_mean(ac(i, i), plus[ui](i, i));
    const double am = harmonic_mean(ac(i, i), minus[ui](i, i));
    centre += ap + am;
    std::array<int, 3> op{0, 0, 0};
    op[ui] = 1;
    s.offsets.push_back(op);
    s.coeffs.push_back(-ap);
    op[ui] = -1;
    s.offsets.push_back(op);
    s.coeffs.push_back(-am);
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      const double fp = plus[ui](i, j) / 4.0;
      const double fm = minus[ui](i, j) / 4.0;
      if (fp == 0.0 && fm == 0.0) continue;
      auto push = [&](int si, int sj, double v) {
        std::array<int, 3> o{0, 0, 0};
        o[ui] = si;
        o[uj] = sj;
        s.offsets.push_back(o);
        s.coeffs.push_back(v);
      };
      push(1, 1, -fp);
      push(1, -1, fp);
      push(-1, 1, fm);
      push(-1, -1, -fm);
    }
  s.offsets.push_back({0, 0, 0});
  s.coeffs.push_back(centre);
  return s;
}

void matvec(const Csr& m, const std::vector<double>& x, std::vector<double>& y) {
  parallel_for(y.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      double s = 0.0;
      for (std::size_t k = m.row[r]; k < m.row[r + 1]; ++k) s += m.val[k] * x[static_cast<std::size_t>(m.col[k])];
      y[r] = s;
    }
  });
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return parallel_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * b[i];
    return s;
  });
}

}  // namespace

GridSolution solve(const GraphDomain& domain, const MatrixField& a, const Ball& ball, const Field& g, double h,
                   const SolveOptions& options) {
  const int d = domain.dim();
  if (a.dim() != d) throw ConfigError("coefficient dimension does not match the domain");
  if (!(h > 0.0) || !(ball.radius > 0.0)) throw ConfigError("spacing and radius must be positive");
  const int m = static_cast<int>(std::ceil(ball.radius / h - 1e-9));
  GridSolution sol;
  sol.ball = ball;
  sol.domain_hash = domain.hash();
  Mesh& mesh = sol.mesh;
  mesh.d = d;
  mesh.h = h;
  for (int i = 0; i < 3; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    mesh.n[ui] = i < d ? 2 * m + 1 : 1;
    mesh.lo[ui] = i < d ? ball.center[ui] - m * h : 0.0;
  }
  const std::size_t total = mesh.size();
  sol.values.assign(total, 0.0);
  sol.kind.assign(total, NodeKind::Graph);
  sol.valid.assign(total, 0);

  std::vector<std::int64_t> unknown(total, -1);
  std::vector<std::size_t> nodes;
  for (std::size_t p = 0; p < total; ++p) {
    const Vec x = mesh.node(p);
    const double gap = domain.gap(x);
    sol.valid[p] = gap > -0.5 * h ? 1 : 0;
    if (gap < 0.5 * h) {
      sol.kind[p] = NodeKind::Graph;
      sol.values[p] = 0.0;
    } else if (norm(x - ball.center) >= ball.radius * (1.0 - 1e-12)) {
      sol.kind[p] = NodeKind::Sphere;
      sol.values[p] = g(x);
    } else {
      sol.kind[p] = NodeKind::Unknown;
      unknown[p] = static_cast<std::int64_t>(nodes.size());
      nodes.push_back(p);
    }
  }

  const std::size_t n = nodes.size();
  Csr csr;
  csr.row.assign(n + 1, 0);
  csr.diag.assign(n, 0.0);
  std::vector<double> b(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const std::array<int, 3> c = mesh.coords(nodes[r]);
    const Stencil st = stencil_at(mesh, a, c);
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
      std::array<int, 3> q = c;
      for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] += st.offsets[k][static_cast<std::size_t>(i)];
      const std::size_t qi = mesh.index(q[0], q[1], q[2]);
      const double v = st.coeffs[k];
      if (unknown[qi] >= 0) {
        csr.col.push_back(unknown[qi]);
        csr.val.push_back(v);
        if (unknown[qi] == static_cast<std::int64_t>(r)) csr.diag[r] = v;
      } else {
        b[r] -= v * sol.values[qi];
      }
    }
    csr.row[r + 1] = csr.col.size();
  }

  std::vector<double> x(n, 0.0);
  std::vector<double> res = b;
  std::vector<double> z(n), p(n), ap(n);
  const double bnorm = std::sqrt(dot(b, b));
  sol.history.clear();
  if (bnorm == 0.0 || n == 0) {
    sol.residual = 0.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) z[i] = res[i] / csr.diag[i];
    p = z;
    double rz = dot(res, z);
    int it = 0;
    double rel = 1.0;
    sol.history.push_back(rel);
    while (rel > options.tol) {
      if (it >= options.max_iterations) throw SolverError("conjugate gradient did not converge", sol.history);
      matvec(csr, p, ap);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) throw SolverError("system matrix is not positive definite", sol.history);
      const double alpha = rz / pap;
      parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          x[i] += alpha * p[i];
          res[i] -= alpha * ap[i];
          z[i] = res[i] / csr.diag[i];
        }
      });
      const double rz_new = dot(res, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      parallel_for(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) p[i] = z[i] + beta * p[i];
      });
      ++it;
      rel = std::sqrt(dot(res, res)) / bnorm;
      sol.history.push_back(rel);
    }
    sol.iterations = it;
    sol.residual = rel;
  }
  for (std::size_t r = 0; r < n; ++r) sol.values[nodes[r]] = x[r];
  return sol;
}

double discrete_residual(const GridSolution& sol, const MatrixField& a) {
  const Mesh& mesh = sol.mesh;
  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t p = 0; p < mesh.size(); ++p) {
    if (sol.kind[p] != NodeKind::Unknown) continue;
    const std::array<int, 3> c = mesh.coords(p);
    const Stencil st = stencil_at(mesh, a, c);
    double r = 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
      std::array<int, 3> q = c;
      for (int i = 0; i < 3; ++i) q[static_cast<std::size_t>(i)] += st.offsets[k][static_cast<std::size_t>(i)];
      const double term = st.coeffs[k] * sol.values[mesh.index(q[0], q[1], q[2])];
      r += term;
      s = std::max(s, std::abs(term));
    }
    worst = std::max(worst, std::abs(r));
    scale = std::max(scale, s);
  }
  return scale == 0.0 ? 0.0 : worst / scale;
}

namespace {

constexpr char kMagic[8] = {'U', 'C', 'L', 'A', 'B', 'S', 'O', 'L'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("truncated checkpoint file");
  return v;
}

}  // namespace

void write_checkpoint(const GridSolution& sol, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot open checkpoint for writing: " + path);
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.mesh.d));
  for (int i = 0; i < 3; ++i) put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.mesh.n[static_cast<std::size_t>(i)]));
  put<double>(os, sol.mesh.h);
  for (int i = 0; i < 3; ++i) put<double>(os, sol.mesh.lo[static_cast<std::size_t>(i)]);
  for (int i = 0; i < 3; ++i) put<double>(os, sol.ball.center[static_cast<std::size_t>(i)]);
  put<double>(os, sol.ball.radius);
  put<std::uint64_t>(os, sol.domain_hash);
  put<double>(os, sol.residual);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.iterations));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(sol.config_json.size()));
  os.write(sol.config_json.data(), static_cast<std::streamsize>(sol.config_json.size()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(sol.values.size()));
  for (double v : sol.values) put<double>(os, v);
  for (std::size_t i = 0; i < sol.kind.size(); ++i) {
    const std::uint8_t flags = static_cast<std::uint8_t>(static_cast<std::uint8_t>(sol.kind[i]) | (sol.valid[i] << 4));
    put<std::uint8_t>(os, flags);
  }
  if (!os) throw ConfigError("failed writing checkpoint: " + path);
}

GridSolution read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0) throw ConfigError("not a solution checkpoint: " + path);
  if (get<std::uint32_t>(is) != kVersion) throw ConfigError("unsupported checkpoint version");
  GridSolution sol;
  sol.mesh.d = static_cast<int>(get<std::uint32_t>(is));
  for (int i = 0; i < 3; ++i) sol.mesh.n[static_cast<std::size_t>(i)] = static_cast<int>(get<std::uint32_t>(is));
  sol.mesh.h = get<double>(is);
  for (int i = 0; i < 3; ++i) sol.mesh.lo[static_cast<std::size_t>(i)] = get<double>(is);
  for (int i = 0; i < 3; ++i) sol.ball.center[static_cast<std::size_t>(i)] = get<double>(is);
  sol.ball.radius = get<double>(is);
  sol.domain_hash = get<std::uint64_t>(is);
  sol.residual = get<double>(is);
  sol.iterations = static_cast<int>(get<std::uint32_t>(is));
  const std::uint32_t len = get<std::uint32_t>(is);
  sol.config_json.resize(len);
  is.read(sol.config_json.data(), len);
  const std::uint64_t count = get<std::uint64_t>(is);
  if (count != sol.mesh.size()) throw ConfigError("checkpoint node count does not match its header");
  sol.values.resize(count);
  for (auto& v : sol.values) v = get<double>(is);
  sol.kind.resize(count);
  sol.valid.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto flags = get<std::uint8_t>(is);
    sol.kind[i] = static_cast<NodeKind>(flags & 0x0f);
    sol.valid[i] = static_cast<std::uint8_t>(flags >> 4);
  }
  return sol;
}

namespace {

AnalyticSolution halfplane_harmonic(int k, int d) {
  AnalyticSolution s;
  s.name = "halfplane_harmonic_" + std::to_string(k);
  s.degree = k;
  s.homogeneous = true;
  s.paired = Mat::identity(d);
  const std::size_t v = static_cast<std::size_t>(d - 1);
  s.u = [k, v](const Vec& x) { return std::pow(std::complex<double>(x[0], x[v]), k).imag(); };
  s.grad = [k, v](const Vec& x) {
    const std::complex<double> dz = static_cast<double>(k) * std::pow(std::complex<double>(x[0], x[v]), k - 1);
    Vec g{};
    g[0] = dz.imag();
    g[v] = dz.real();
    return g;
  };
  return s;
}

}  // namespace

AnalyticSolution analytic_library(const std::string& name, const std::vector<double>& params) {
  if (name == "halfplane_harmonic" || name.rfind("halfplane_harmonic_", 0) == 0) {
    int k = 1;
    const std::string suffix = name.size() > 19 ? name.substr(19) : "";
    if (suffix.empty() || suffix == "k") {
      if (!params.empty()) k = static_cast<int>(params[0]);
    } else {
      try {
        std::size_t used = 0;
        k = std::stoi(suffix, &used);
        if (used != suffix.size()) throw std::invalid_argument(suffix);
      } catch (const std::logic_error&) {
        throw ConfigError("unknown analytic solution '" + name + "'");
      }
    }
    const int d = params.size() >= 2 ? static_cast<int>(params[1]) : 2;
    if (k < 1 || (d != 2 && d != 3)) throw ConfigError("halfplane harmonic needs k >= 1 and d in {2, 3}");
    return halfplane_harmonic(k, d);
  }
  if (name == "wedge_harmonic") {
    if (params.empty()) throw ConfigError("wedge_harmonic needs the opening angle");
    const double theta = params[0];
    if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi)) throw ConfigError("wedge opening must lie in (0, 2pi)");
    const double a = std::numbers::pi / theta;
    const double start = std::numbers::pi / 2.0 - theta / 2.0;
    AnalyticSolution s;
    s.name = "wedge_harmonic";
    s.degree = a;
    s.homogeneous = true;
    s.paired = Mat::identity(2);
    auto angle = [start](const Vec& x) {
      double psi = std::atan2(x[1], x[0]) - start;
      if (psi < 0.0) psi += 2.0 * std::numbers::pi;
      return psi;
    };
    s.u = [a, theta, angle](const Vec& x) {
      const double r = std::hypot(x[0], x[1]);
      if (r == 0.0) return 0.0;
      const double psi = angle(x);
      if (psi > theta) return 0.0;
      return std::pow(r, a) * std::sin(a * psi);
    };
    s.grad = [a, theta, angle](const Vec& x) {
      const double r = std::hypot(x[0], x[1]);
      Vec g{};
      if (r == 0.0) return g;
      const double psi = angle(x);
      if (psi > theta) return g;
      const double al = std::atan2(x[1], x[0]);
      const double ur = a * std::pow(r, a - 1.0) * std::sin(a * psi);
      const double ut = a * std::pow(r, a - 1.0) * std::cos(a * psi);
      g[0] = ur * std::cos(al) - ut * std::sin(al);
      g[1] = ur * std::sin(al) + ut * std::cos(al);
      return g;
    };
    return s;
  }
  if (name == "constant_coefficient_affine_image") {
    if (params.size() < 4) throw ConfigError("affine image needs k, e11, e12, e22");
    const int k = static_cast<int>(params[0]);
    Mat e(2);
    e(0, 0) = params[1];
    e(0, 1) = e(1, 0) = params[2];
    e(1, 1) = params[3];
    const Mat e_inv = e.inverse();
    const AnalyticSolution base = halfplane_harmonic(k, 2);
    AnalyticSolution s;
    s.name = name;
    s.degree = k;
    s.homogeneous = true;
    s.paired = e * e;
    s.u = [base, e_inv](const Vec& x) { return base.u(e_inv * x); };
    s.grad = [base, e_inv](const Vec& x) { return e_inv * base.grad(e_inv * x); };
    return s;
  }
  throw ConfigError("unknown analytic solution: " + name);
}

AnalyticSolution combine(const AnalyticSolution& a, double ca, const AnalyticSolution& b, double cb) {
  AnalyticSolution s;
  s.name = a.name + "+" + b.name;
  s.homogeneous = a.degree == b.degree && a.homogeneous && b.homogeneous;
  s.degree = s.homogeneous ? a.degree : 0.0;
  s.paired = a.paired;
  s.u = [a, b, ca, cb](const Vec& x) { return ca * a.u(x) + cb * b.u(x); };
  s.grad = [a, b, ca, cb](const Vec& x) { return ca * a.grad(x) + cb * b.grad(x); };
  return s;
}

}  // namespace uclab
