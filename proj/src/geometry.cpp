#include "uclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "uclab/coefficients.hpp"
#include "uclab/error.hpp"

namespace uclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double frac(double t) { return t - std::floor(t); }

double lattice_distance(double t, double step) {
  const double q = t / step;
  return std::abs(q - std::round(q)) * step;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Modulus Modulus::zero(double r0) {
  Modulus m;
  m.r0 = r0;
  return m;
}

Modulus Modulus::power(double amplitude, double exponent, double r0) {
  if (amplitude < 0.0 || exponent <= 0.0) throw ConfigError("power modulus needs amplitude >= 0 and exponent > 0");
  Modulus m;
  m.kind = Kind::Power;
  m.amplitude = amplitude;
  m.exponent = exponent;
  m.r0 = r0;
  return m;
}

Modulus Modulus::tabulated(std::vector<double> rho, std::vector<double> value, double r0) {
  if (rho.size() != value.size() || rho.size() < 2) throw ConfigError("tabulated modulus needs matching tables");
  Modulus m;
  m.kind = Kind::Tabulated;
  m.rho = std::move(rho);
  m.value = std::move(value);
  m.r0 = r0;
  return m;
}

double Modulus::operator()(double r) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Power:
      return r <= 0.0 ? 0.0 : amplitude * std::pow(r, exponent);
    case Kind::Tabulated: {
      // Below the first node the table is joined linearly to omega(0) = 0.
      if (r <= rho.front()) return rho.front() > 0.0 ? value.front() * std::max(r, 0.0) / rho.front() : value.front();
      if (r >= rho.back()) return value.back();
      const auto it = std::upper_bound(rho.begin(), rho.end(), r);
      const std::size_t i = static_cast<std::size_t>(it - rho.begin());
      const double t = (r - rho[i - 1]) / (rho[i] - rho[i - 1]);
      return value[i - 1] + t * (value[i] - value[i - 1]);
    }
  }
  return 0.0;
}

bool Modulus::valid(int samples) const {
  double prev = -kInf;
  for (int i = 1; i <= samples; ++i) {
    const double w = (*this)(r0 * i / samples);
    if (w < 0.0 || w < prev) return false;
    prev = w;
  }
  // The limit at 0 is exact for the closed forms and read off the table otherwise.
  switch (kind) {
    case Kind::Zero:
      return true;
    case Kind::Power:
      return amplitude >= 0.0 && exponent > 0.0;
    case Kind::Tabulated:
      return (*this)(0.0) <= 1e-12 * std::max(1.0, (*this)(r0));
  }
  return false;
}

std::string Modulus::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Zero:
      os << "zero";
      break;
    case Kind::Power:
      os << "power:" << fmt_double(amplitude) << ":" << fmt_double(exponent);
      break;
    case Kind::Tabulated:
      os << "tabulated:" << rho.size();
      for (std::size_t i = 0; i < rho.size(); ++i) os << ":" << fmt_double(rho[i]) << "," << fmt_double(value[i]);
      break;
  }
  os << ";r0=" << fmt_double(r0);
  return os.str();
}

GraphDomain GraphDomain::halfplane(int d, Modulus modulus) {
  if (d != 2 && d != 3) throw ConfigError("dimension must be 2 or 3");
  GraphDomain g;
  g.d_ = d;
  g.family_ = DomainFamily::Halfplane;
  g.modulus_ = std::move(modulus);
  g.reference_ = Ball{Vec{}, 2.0 * g.modulus_.r0};
  return g;
}

GraphDomain GraphDomain::wedge(int d, double theta, Modulus modulus) {
  if (d != 2 && d != 3) throw ConfigError("dimension must be 2 or 3");
  if (!(theta > 0.0 && theta < 2.0 * std::numbers::pi)) throw ConfigError("wedge opening must lie in (0, 2pi)");
  GraphDomain g = halfplane(d, std::move(modulus));
  g.family_ = DomainFamily::Wedge;
  g.theta_ = theta;
  g.cot_half_ = std::cos(theta / 2.0) / std::sin(theta / 2.0);
  g.lipschitz_ = std::abs(g.cot_half_);
  return g;
}

GraphDomain GraphDomain::sawtooth(int d, double amplitude, int levels, SawtoothProfile profile, Modulus modulus) {
  if (levels < 1 || levels > 30) throw ConfigError("sawtooth levels must lie in [1, 30]");
  if (amplitude < 0.0) throw ConfigError("sawtooth amplitude must be nonnegative");
  GraphDomain g = halfplane(d, std::move(modulus));
  g.family_ = DomainFamily::Sawtooth;
  g.amplitude_ = amplitude;
  g.levels_ = levels;
  g.profile_ = profile;
  const double per_axis =
      profile == SawtoothProfile::Scallop ? amplitude * (1.0 - std::ldexp(1.0, -levels)) : amplitude * levels;
  g.lipschitz_ = per_axis * std::sqrt(static_cast<double>(d - 1));
  return g;
}

GraphDomain GraphDomain::tabulated(int d, GraphTable table, Modulus modulus) {
  GraphDomain g = halfplane(d, std::move(modulus));
  if (d == 2) table.n1 = 1;
  if (table.n0 < 2 || (d == 3 && table.n1 < 2) ||
      table.values.size() != static_cast<std::size_t>(table.n0) * static_cast<std::size_t>(table.n1))
    throw ConfigError("tabulated boundary has inconsistent table size");
  g.family_ = DomainFamily::Tabulated;
  g.table_ = std::move(table);
  double lip = 0.0;
  const auto& t = g.table_;
  for (int j = 0; j < t.n1; ++j)
    for (int i = 0; i < t.n0; ++i) {
      const double v = t.values[static_cast<std::size_t>(j * t.n0 + i)];
      if (i + 1 < t.n0) lip = std::max(lip, std::abs(t.values[static_cast<std::size_t>(j * t.n0 + i + 1)] - v) / t.spacing);
      if (d == 3 && j + 1 < t.n1)
        lip = std::max(lip, std::abs(t.values[static_cast<std::size_t>((j + 1) * t.n0 + i)] - v) / t.spacing);
    }
  g.lipschitz_ = lip * std::sqrt(static_cast<double>(d - 1));
  return g;
}

double GraphDomain::profile_value(double t) const {
  double sum = 0.0;
  for (int k = 1; k <= levels_; ++k) {
    const double s = frac(std::ldexp(t, k));
    if (profile_ == SawtoothProfile::Scallop)
      sum += amplitude_ * std::ldexp(1.0, -2 * k) * s * (1.0 - s);
    else
      sum += amplitude_ * std::ldexp(1.0, -k) * std::min(s, 1.0 - s);
  }
  return sum;
}

double GraphDomain::profile_slope(double t, int side) const {
  double sum = 0.0;
  for (int k = 1; k <= levels_; ++k) {
    const double scaled = std::ldexp(t, k);
    double s = frac(scaled);
    // On a lattice point the one-sided slope is taken from the adjacent piece.
    const bool on_lattice = std::abs(scaled - std::round(scaled)) < 1e-12;
    if (on_lattice) s = side > 0 ? 0.0 : 1.0;
    if (profile_ == SawtoothProfile::Scallop) {
      sum += amplitude_ * std::ldexp(1.0, -k) * (1.0 - 2.0 * s);
    } else {
      const bool on_peak = std::abs(s - 0.5) < 1e-12;
      double slope = s < 0.5 ? 1.0 : -1.0;
      if (on_peak) slope = side > 0 ? -1.0 : 1.0;
      sum += amplitude_ * slope;
    }
  }
  return sum;
}

double GraphDomain::table_value(double a, double b) const {
  const auto& t = table_;
  const double fa = (a - t.lo[0]) / t.spacing;
  const double eps = 1e-9;
  if (fa < -eps || fa > t.n0 - 1 + eps) throw OutOfRangeError("boundary table queried outside its range");
  int i = std::clamp(static_cast<int>(std::floor(fa)), 0, t.n0 - 2);
  const double wa = std::clamp(fa - i, 0.0, 1.0);
  if (d_ == 2) {
    return (1.0 - wa) * t.values[static_cast<std::size_t>(i)] + wa * t.values[static_cast<std::size_t>(i + 1)];
  }
  const double fb = (b - t.lo[1]) / t.spacing;
  if (fb < -eps || fb > t.n1 - 1 + eps) throw OutOfRangeError("boundary table queried outside its range");
  int j = std::clamp(static_cast<int>(std::floor(fb)), 0, t.n1 - 2);
  const double wb = std::clamp(fb - j, 0.0, 1.0);
  auto at = [&](int ii, int jj) { return t.values[static_cast<std::size_t>(jj * t.n0 + ii)]; };
  return (1.0 - wa) * (1.0 - wb) * at(i, j) + wa * (1.0 - wb) * at(i + 1, j) + (1.0 - wa) * wb * at(i, j + 1) +
         wa * wb * at(i + 1, j + 1);
}

double GraphDomain::phi(const Vec& x) const {
  switch (family_) {
    case DomainFamily::Halfplane:
      return 0.0;
    case DomainFamily::Wedge:
      return cot_half_ * norm(horizontal(x, d_));
    case DomainFamily::Sawtooth: {
      double s = profile_value(x[0]);
      if (d_ == 3) s += profile_value(x[1]);
      return s;
    }
    case DomainFamily::Tabulated:
      return table_value(x[0], x[1]);
  }
  return 0.0;
}

double GraphDomain::one_sided_partial(const Vec& x, int axis, int side) const {
  switch (family_) {
    case DomainFamily::Halfplane:
      return 0.0;
    case DomainFamily::Wedge: {
      const Vec h = horizontal(x, d_);
      const double r = norm(h);
      if (r < 1e-14) return side > 0 ? cot_half_ : -cot_half_;
      return cot_half_ * h[static_cast<std::size_t>(axis)] / r;
    }
    case DomainFamily::Sawtooth:
      return profile_slope(x[static_cast<std::size_t>(axis)], side);
    case DomainFamily::Tabulated: {
      const auto& t = table_;
      const double step = t.spacing;
      Vec plus = x;
      Vec minus = x;
      plus[static_cast<std::size_t>(axis)] += step;
      minus[static_cast<std::size_t>(axis)] -= step;
      const double lo = t.lo[static_cast<std::size_t>(axis)];
      const int n = axis == 0 ? t.n0 : t.n1;
      const double hi = lo + (n - 1) * step;
      const double c = x[static_cast<std::size_t>(axis)];
      if (c + step > hi + 1e-12) return (phi(x) - phi(minus)) / step;
      if (c - step < lo - 1e-12) return (phi(plus) - phi(x)) / step;
      return (phi(plus) - phi(minus)) / (2.0 * step);
    }
  }
  return 0.0;
}

Vec GraphDomain::grad_phi(const Vec& x) const {
  Vec g{};
  for (int i = 0; i < d_ - 1; ++i)
    g[static_cast<std::size_t>(i)] = 0.5 * (one_sided_partial(x, i, +1) + one_sided_partial(x, i, -1));
  return g;
}

double GraphDomain::kink_distance(const Vec& x) const {
  switch (family_) {
    case DomainFamily::Halfplane:
    case DomainFamily::Tabulated:
      return kInf;
    case DomainFamily::Wedge:
      return norm(horizontal(x, d_));
    case DomainFamily::Sawtooth: {
      const double step = profile_ == SawtoothProfile::Scallop ? std::ldexp(1.0, -levels_) : std::ldexp(1.0, -levels_ - 1);
      double best = lattice_distance(x[0], step);
      if (d_ == 3) best = std::min(best, lattice_distance(x[1], step));
      return best;
    }
  }
  return kInf;
}

BoundaryPoint GraphDomain::boundary_point(const Vec& xprime, double kink_radius) const {
  BoundaryPoint b;
  b.x = lift(horizontal(xprime, d_));
  const Vec g = grad_phi(b.x);
  const double w = std::sqrt(1.0 + dot(g, g));
  b.weight = w;
  b.has_normal = kink_distance(b.x) > std::max(kink_radius, 1e-12);
  if (b.has_normal) {
    Vec n = g;
    n[static_cast<std::size_t>(d_ - 1)] = -1.0;
    b.normal = (1.0 / w) * n;
  } else {
    b.normal = with_vertical(Vec{}, d_, -1.0);
  }
  return b;
}

double GraphDomain::default_tolerance() const {
  if (family_ == DomainFamily::Tabulated) return 10.0 * table_.spacing * lipschitz_;
  return 1e-8 * diameter();
}

std::string GraphDomain::describe() const {
  std::ostringstream os;
  os << "d=" << d_ << ";";
  switch (family_) {
    case DomainFamily::Halfplane:
      os << "halfplane";
      break;
    case DomainFamily::Wedge:
      os << "wedge:" << fmt_double(theta_);
      break;
    case DomainFamily::Sawtooth:
      os << "sawtooth:" << (profile_ == SawtoothProfile::Scallop ? "scallop" : "triangle") << ":"
         << fmt_double(amplitude_) << ":" << levels_;
      break;
    case DomainFamily::Tabulated:
      os << "tabulated:" << table_.n0 << "x" << table_.n1 << ":" << fmt_double(table_.spacing) << ":"
         << fmt_double(table_.lo[0]) << ":" << fmt_double(table_.lo[1]);
      for (double v : table_.values) os << "," << fmt_double(v);
      break;
  }
  os << ";L=" << fmt_double(lipschitz_) << ";omega=" << modulus_.describe();
  return os.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t GraphDomain::hash() const { return fnv1a(describe()); }

QuasiconvexityReport quasiconvexity_check(const GraphDomain& domain, int sample_count, int centers,
                                          double tolerance) {
  if (sample_count < 2) throw PreconditionError("quasiconvexity_check needs at least two samples", Vec{});
  const double r0 = domain.modulus().r0;
  if (!std::isfinite(r0) || r0 <= 0.0) throw PreconditionError("quasiconvexity_check needs a finite r0", Vec{});
  if (tolerance < 0.0) tolerance = domain.default_tolerance();
  const int d = domain.dim();
  const int m = d - 1;
  const Ball& ref = domain.reference_ball();
  centers = std::max(centers, 1);

  // Candidate tilts: per horizontal axis pick the left slope, right slope or their mean.
  QuasiconvexityReport report;
  report.worst_violation = -kInf;
  const int center_total = m == 1 ? centers : centers * centers;
  for (int ci = 0; ci < center_total; ++ci) {
    Vec p{};
    const int ia = ci % centers;
    const int ib = ci / centers;
    auto place = [&](int i) { return centers == 1 ? 0.0 : -ref.radius / 2.0 + ref.radius * i / (centers - 1); };
    p[0] = ref.center[0] + place(ia);
    if (m == 2) p[1] = ref.center[1] + place(ib);
    const double phi_p = domain.phi(p);

    std::vector<Vec> tilts;
    const int choices = m == 1 ? 3 : 9;
    for (int c = 0; c < choices; ++c) {
      Vec g{};
      int code = c;
      for (int axis = 0; axis < m; ++axis) {
        const int pick = code % 3;
        code /= 3;
        const double left = domain.one_sided_partial(p, axis, -1);
        const double right = domain.one_sided_partial(p, axis, +1);
        g[static_cast<std::size_t>(axis)] = pick == 0 ? left : (pick == 1 ? right : 0.5 * (left + right));
      }
      tilts.push_back(g);
    }

    double best_for_center = kInf;
    Vec best_offset{};
    std::size_t count = 0;
    for (const Vec& g : tilts) {
      double worst = -kInf;
      Vec worst_offset{};
      count = 0;
      const int total = m == 1 ? sample_count : sample_count * sample_count;
      for (int s = 0; s < total; ++s) {
        Vec x{};
        auto coord = [&](int i) { return -r0 + 2.0 * r0 * (i + 0.5) / sample_count; };
        x[0] = coord(s % sample_count);
        if (m == 2) x[1] = coord(s / sample_count);
        const double rho = norm(x);
        if (rho >= r0 || rho == 0.0) continue;
        ++count;
        const double dev = domain.phi(p + x) - phi_p - dot(g, x);
        const double v = -dev - rho * domain.modulus()(rho);
        if (v > worst) {
          worst = v;
          worst_offset = x;
        }
      }
      if (worst < best_for_center) {
        best_for_center = worst;
        best_offset = worst_offset;
      }
    }
    report.samples += count;
    if (best_for_center > report.worst_violation) {
      report.worst_violation = best_for_center;
      report.worst_center = domain.lift(p);
      report.worst_offset = best_offset;
    }
  }
  report.pass = report.worst_violation <= tolerance;
  return report;
}

HalfspaceReport halfspace_check(const GraphDomain& domain, const Vec& x0_prime, double r, int samples,
                                double tolerance) {
  if (!(r > 0.0) || r >= domain.modulus().r0) throw OutOfRangeError("halfspace_check radius must lie in (0, r0)");
  if (tolerance < 0.0) tolerance = domain.default_tolerance();
  const int d = domain.dim();
  const BoundaryPoint bp = domain.boundary_point(x0_prime);
  const Vec x0 = bp.x;
  const Vec n = bp.has_normal ? bp.normal : with_vertical(Vec{}, d, -1.0);

  HalfspaceReport report;
  report.normal = n;
  double best = -kInf;
  auto consider = [&](const Vec& y) {
    if (norm(y - x0) > r) return;
    const double v = dot(y - x0, n);
    if (v > best) {
      best = v;
      report.witness = y;
    }
  };

  // The maximum of a linear function over the closure of B_r(x0) ∩ Ω sits on
  // the graph or on the sphere.
  const int m = d - 1;
  const int per_axis = m == 1 ? samples : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const int total = m == 1 ? per_axis + 1 : (per_axis + 1) * (per_axis + 1);
  for (int s = 0; s < total; ++s) {
    Vec xp = x0;
    xp[0] = x0[0] - r + 2.0 * r * (s % (per_axis + 1)) / per_axis;
    if (m == 2) xp[1] = x0[1] - r + 2.0 * r * (s / (per_axis + 1)) / per_axis;
    consider(domain.lift(xp));
  }
  auto sphere_point = [&](const Vec& y) {
    if (domain.gap(y) >= 0.0) consider(y);
  };
  if (d == 2) {
    for (int i = 0; i < samples; ++i) {
      const double t = 2.0 * std::numbers::pi * i / samples;
      sphere_point(x0 + Vec{r * std::cos(t), r * std::sin(t), 0.0});
    }
  } else {
    const int nt = per_axis;
    for (int i = 0; i <= nt; ++i) {
      const double th = std::numbers::pi * i / nt;
      for (int j = 0; j < 2 * nt; ++j) {
        const double ph = std::numbers::pi * j / nt;
        sphere_point(x0 + Vec{r * std::sin(th) * std::cos(ph), r * std::sin(th) * std::sin(ph), r * std::cos(th)});
      }
    }
  }
  report.excess = best - r * domain.modulus()(r);
  report.pass = report.excess <= tolerance;
  return report;
}

StarshapeReport starshape_check(const GraphDomain& domain, const MatrixField& a, const Vec& x0, double radius,
                                int sample_count, double tolerance, double kink_radius) {
  const int d = domain.dim();
  if (domain.gap(x0) < -domain.default_tolerance()) throw DomainError("starshape centre lies outside the domain");
  if (sample_count < 2) throw PreconditionError("starshape_check needs at least two samples", x0);
  const Mat a0_inv = a(x0).inverse();
  const int m = d - 1;
  const double spacing = 2.0 * radius / sample_count;
  if (kink_radius < 0.0) kink_radius = spacing;

  StarshapeReport report;
  report.min_value = kInf;
  const int total = m == 1 ? sample_count + 1 : (sample_count + 1) * (sample_count + 1);
  for (int s = 0; s < total; ++s) {
    Vec xp = horizontal(x0, d);
    xp[0] = x0[0] - radius + spacing * (s % (sample_count + 1));
    if (m == 2) xp[1] = x0[1] - radius + spacing * (s / (sample_count + 1));
    const BoundaryPoint b = domain.boundary_point(xp, kink_radius);
    if (norm(b.x - x0) >= radius) continue;
    if (!b.has_normal) {
      ++report.skipped_kinks;
      continue;
    }
    const Vec w = a(b.x) * (a0_inv * (b.x - x0));
    const double v = dot(b.normal, w);
    ++report.tested;
    if (v < report.min_value) {
      report.min_value = v;
      report.witness = b.x;
    }
  }
  if (report.tested == 0) throw PreconditionError("no boundary samples inside the starshape ball", x0);
  report.pass = report.min_value >= -tolerance;
  return report;
}

bool starshape_sufficiency(const GraphDomain& domain, const MatrixField& a, double side, double s, double t) {
  if (!(s > 0.0 && t > 0.0 && side > 0.0)) throw PreconditionError("starshape_sufficiency needs positive S, T, side", Vec{});
  const double gamma = a.lipschitz();
  if (gamma == 0.0) return true;
  const double L = domain.lipschitz();
  const double q = std::sqrt(1.0 + L * L) * t + s;
  const double lhs = s * s * side + q * domain.modulus()(q * side);
  const double rhs = 1.0 / (gamma * a.ellipticity() * (1.0 + L * L) * t);
  return lhs <= rhs;
}

double surface_integrate(const GraphDomain& domain, const GraphPatch& patch, const Field& f) {
  const int d = domain.dim();
  const int n = std::max(patch.cells, 1);
  const double w0 = (patch.hi[0] - patch.lo[0]) / n;
  const double w1 = d == 3 ? (patch.hi[1] - patch.lo[1]) / n : 1.0;
  const int total = d == 2 ? n : n * n;
  double sum = 0.0;
  for (int s = 0; s < total; ++s) {
    Vec xp{};
    xp[0] = patch.lo[0] + (s % n + 0.5) * w0;
    if (d == 3) xp[1] = patch.lo[1] + (s / n + 0.5) * w1;
    const Vec g = domain.grad_phi(xp);
    sum += f(domain.lift(xp)) * std::sqrt(1.0 + dot(g, g));
  }
  return sum * w0 * w1;
}

double surface_integrate(const GraphDomain& domain, const SpherePatch& patch, const Field& f) {
  return sphere_integrate(domain.dim(), patch.center, patch.radius, patch.resolution,
                          [&](const Vec& y) { return domain.contains(y); }, f);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    nodes[static_cast<std::size_t>(i)] = x;
    weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

double sphere_integrate(int d, const Vec& center, double radius, int resolution, const Predicate& inside,
                        const Field& f) {
  double sum = 0.0;
  if (d == 2) {
    const int n = std::max(resolution, 4);
    const double dt = 2.0 * std::numbers::pi / n;
    for (int i = 0; i < n; ++i) {
      const double t = (i + 0.5) * dt;
      const Vec y = center + Vec{radius * std::cos(t), radius * std::sin(t), 0.0};
      if (inside(y)) sum += f(y);
    }
    return sum * radius * dt;
  }
  const int nt = std::max(resolution / 2, 2);
  const int np = 2 * nt;
  std::vector<double> nodes;
  std::vector<double> weights;
  gauss_legendre(nt, nodes, weights);
  const double dp = 2.0 * std::numbers::pi / np;
  for (int i = 0; i < nt; ++i) {
    const double c = nodes[static_cast<std::size_t>(i)];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double ring = 0.0;
    for (int j = 0; j < np; ++j) {
      const double p = (j + 0.5) * dp;
      const Vec y = center + Vec{radius * s * std::cos(p), radius * s * std::sin(p), radius * c};
      if (inside(y)) ring += f(y);
    }
    sum += ring * weights[static_cast<std::size_t>(i)];
  }
  return sum * dp * radius * radius;
}

}  // namespace uclab
