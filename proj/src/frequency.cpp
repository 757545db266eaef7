#include "uclab/frequency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "uclab/error.hpp"

namespace uclab {

namespace {

int default_cells(int d, int requested) { return requested > 0 ? requested : (d == 2 ? 48 : 24); }

double checked_log_ratio(double big, double small) {
  if (!(small > 0.0) || !(big > 0.0)) throw DegenerateMassError("weighted mass vanishes");
  return std::log(big / small);
}

}  // namespace

double weight_mu(const Mat& a0_inv, const Mat& ay, const Vec& v) {
  const Vec w = a0_inv * v;
  const double den = dot(v, w);
  if (den == 0.0) throw UndefinedPointError("weight is undefined at the centre");
  return dot(w, ay * w) / den;
}

double weight_mu(const MatrixField& a, const Vec& x0, const Vec& y) {
  const Vec v = y - x0;
  if (norm(v) == 0.0) throw UndefinedPointError("weight is undefined at the centre");
  return weight_mu(a(x0).inverse(), a(y), v);
}

Vec Ellipsoid::half_extent() const {
  Vec ext{};
  for (int i = 0; i < map.a0.dim(); ++i) ext[static_cast<std::size_t>(i)] = r * std::sqrt(map.a0(i, i));
  return ext;
}

Ellipsoid ellipsoid_F(const MatrixField& a, const Vec& x0, double r) {
  if (!(r > 0.0)) throw PreconditionError("ellipsoid radius must be positive", x0);
  Ellipsoid e;
  e.map = sqrt_at(a, x0);
  e.r = r;
  return e;
}

double cell_quadrature(int d, const Vec& anchor, const Vec& extent, double cell, const Predicate& inside,
                       const Field& f, int subsamples, std::size_t* cells) {
  std::array<int, 3> k_max{0, 0, 0};
  for (int i = 0; i < d; ++i)
    k_max[static_cast<std::size_t>(i)] = static_cast<int>(std::ceil(extent[static_cast<std::size_t>(i)] / cell - 1e-12));
  const double vol = std::pow(cell, d);
  const int sub = std::max(subsamples, 1);
  int sub_total = 1;
  for (int i = 0; i < d; ++i) sub_total *= sub;
  const int corners = 1 << d;
  double sum = 0.0;
  std::size_t used = 0;
  const int k2 = d == 3 ? k_max[2] : 0;
  const int k2_lo = d == 3 ? -k_max[2] : 0;
  const int k2_hi = d == 3 ? k2 : 1;
  for (int c = k2_lo; c < k2_hi; ++c)
    for (int b = -k_max[1]; b < k_max[1]; ++b)
      for (int a = -k_max[0]; a < k_max[0]; ++a) {
        const std::array<int, 3> k{a, b, c};
        Vec lo = anchor;
        for (int i = 0; i < d; ++i) lo[static_cast<std::size_t>(i)] += k[static_cast<std::size_t>(i)] * cell;
        Vec centre = lo;
        for (int i = 0; i < d; ++i) centre[static_cast<std::size_t>(i)] += 0.5 * cell;
        const bool in_centre = inside(centre);
        bool all = in_centre;
        bool any = in_centre;
        for (int q = 0; q < corners; ++q) {
          Vec x = lo;
          for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] += ((q >> i) & 1) * cell;
          const bool in = inside(x);
          all = all && in;
          any = any || in;
        }
        if (!any) continue;
        ++used;
        if (all) {
          sum += f(centre) * vol;
          continue;
        }
        double part = 0.0;
        for (int s = 0; s < sub_total; ++s) {
          Vec x = lo;
          int code = s;
          for (int i = 0; i < d; ++i) {
            x[static_cast<std::size_t>(i)] += cell * ((code % sub) + 0.5) / sub;
            code /= sub;
          }
          if (inside(x)) part += f(x);
        }
        sum += part * vol / sub_total;
      }
  if (cells != nullptr) *cells = used;
  return sum;
}

namespace {

WeightedMass mass_direct(const Field& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
                         const MassOptions& options) {
  const int d = domain.dim();
  const Ellipsoid ell = ellipsoid_F(a, x0, r);
  const Vec ext = ell.half_extent();
  if (options.solved) {
    const double lam = jacobi_eigen(ell.map.a0).values[static_cast<std::size_t>(d - 1)];
    const double reach = r * std::sqrt(lam);
    if (norm(x0 - options.solved->center) + reach > options.solved->radius * (1.0 + 1e-12))
      throw OutOfRangeError("ellipsoid escapes the solved region");
  }
  const Mat a0_inv = ell.map.a0.inverse();
  const Predicate inside = [&](const Vec& y) { return ell.contains(y) && domain.contains(y); };
  const Field integrand = [&](const Vec& y) {
    const double v = u(y);
    if (v == 0.0) return 0.0;
    return weight_mu(a0_inv, a(y), y - x0) * v * v;
  };
  const int n = default_cells(d, options.cells_per_radius);
  WeightedMass m;
  m.x0 = x0;
  m.r = r;
  m.value = cell_quadrature(d, x0, ext, r / n, inside, integrand, options.subsamples, &m.cells) / ell.map.sqrt_det;
  if (options.estimate_error) {
    const double coarse =
        cell_quadrature(d, x0, ext, r / std::max(n / 2, 1), inside, integrand, options.subsamples) / ell.map.sqrt_det;
    m.error = std::abs(m.value - coarse);
  }
  return m;
}

}  // namespace

WeightedMass J(const Field& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
               const MassOptions& options) {
  return mass_direct(u, a, domain, x0, r, options);
}

WeightedMass J(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
               MassOptions options) {
  if (!options.solved) options.solved = u.ball;
  return mass_direct(u.field(), a, domain, x0, r, options);
}

WeightedMass J_normalized(const NormalizedProblem& p, double r, const MassOptions& options) {
  const int d = p.d;
  const Mat a0_inv = p.a_tilde(Vec{}).inverse();
  const Field integrand = [&](const Vec& z) {
    const double v = p.u(z);
    if (v == 0.0) return 0.0;
    return weight_mu(a0_inv, p.a_tilde(z), z) * v * v;
  };
  const Predicate inside = [&](const Vec& z) { return norm(z) < r && p.contains(z); };
  Vec ext{};
  for (int i = 0; i < d; ++i) ext[static_cast<std::size_t>(i)] = r;
  const int n = default_cells(d, options.cells_per_radius);
  WeightedMass m;
  m.x0 = p.map.x0;
  m.r = r;
  m.value = cell_quadrature(d, Vec{}, ext, r / n, inside, integrand, options.subsamples, &m.cells);
  if (options.estimate_error) {
    const double coarse = cell_quadrature(d, Vec{}, ext, r / std::max(n / 2, 1), inside, integrand, options.subsamples);
    m.error = std::abs(m.value - coarse);
  }
  return m;
}

double doubling_index(const Field& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
                      const MassOptions& options) {
  MassOptions o = options;
  o.estimate_error = false;
  const double small = J(u, a, domain, x0, r, o).value;
  const double big = J(u, a, domain, x0, 2.0 * r, o).value;
  return checked_log_ratio(big, small);
}

double doubling_index(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0,
                      double r, MassOptions options) {
  options.estimate_error = false;
  const double small = J(u, a, domain, x0, r, options).value;
  const double big = J(u, a, domain, x0, 2.0 * r, options).value;
  return checked_log_ratio(big, small);
}

std::vector<double> geometric_grid(double r_min, double r_max) {
  std::vector<double> g;
  if (!(r_min > 0.0) || r_max < r_min) throw PreconditionError("radius grid needs 0 < r_min <= r_max", Vec{});
  for (int i = 0;; ++i) {
    const double r = r_min * std::exp2(i / 4.0);
    if (r > r_max * (1.0 + 1e-12)) break;
    g.push_back(r);
  }
  return g;
}

FrequencyCurves frequency(const NormalizedProblem& p, const std::vector<double>& r_grid,
                          const FrequencyOptions& options) {
  const int d = p.d;
  const int res = options.sphere_resolution > 0 ? options.sphere_resolution : (d == 2 ? 4096 : 96);
  const int n = default_cells(d, options.cells_per_radius);
  const Mat a0_inv = p.a_tilde(Vec{}).inverse();
  FrequencyCurves c;
  c.d = d;
  for (double r : r_grid) {
    const Field hmu = [&](const Vec& z) {
      const double v = p.u(z);
      if (v == 0.0) return 0.0;
      return weight_mu(a0_inv, p.a_tilde(z), z) * v * v;
    };
    const double H = sphere_integrate(d, Vec{}, r, res, p.contains, hmu);
    const Field energy = [&](const Vec& z) {
      const Vec g = p.grad_u(z);
      return dot(g, p.a_tilde(z) * g);
    };
    Vec ext{};
    for (int i = 0; i < d; ++i) ext[static_cast<std::size_t>(i)] = r;
    const Predicate inside = [&](const Vec& z) { return norm(z) < r && p.contains(z); };
    const double D = cell_quadrature(d, Vec{}, ext, r / n, inside, energy, options.subsamples);
    if (!(H > 0.0)) throw DegenerateMassError("boundary mass H vanishes");
    c.r.push_back(r);
    c.H.push_back(H);
    c.D.push_back(D);
    c.N.push_back(r * D / H);
  }
  return c;
}

LogDerivativeReport check_H_logderivative(const FrequencyCurves& curves, double gamma) {
  LogDerivativeReport rep;
  const std::size_t m = curves.r.size();
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double r = curves.r[i];
    const double dlog = (std::log(curves.H[i + 1]) - std::log(curves.H[i - 1])) /
                        (std::log(curves.r[i + 1]) - std::log(curves.r[i - 1]));
    const double hp_over_h = dlog / r;
    const double defect = std::abs(hp_over_h - (curves.d - 1) / r - 2.0 * curves.N[i] / r);
    rep.r.push_back(r);
    rep.defect.push_back(defect);
    rep.max_defect = std::max(rep.max_defect, defect);
  }
  rep.c_emp = gamma > 0.0 ? rep.max_defect / gamma : rep.max_defect;
  return rep;
}

MassFunction mass_function(const GridSolution& u, const MatrixField& a, const GraphDomain& domain,
                           MassOptions options) {
  options.estimate_error = false;
  if (!options.solved) options.solved = u.ball;
  return [&u, a, domain, options](const Vec& x0, double r) { return J(u.field(), a, domain, x0, r, options).value; };
}

MassFunction mass_function(const Field& u, const MatrixField& a, const GraphDomain& domain, MassOptions options) {
  options.estimate_error = false;
  return [u, a, domain, options](const Vec& x0, double r) { return J(u, a, domain, x0, r, options).value; };
}

ThreeBallReport check_three_ball(const MassFunction& mass, int d, const Vec& x0, double r1, double r2, double r3,
                                 double c_trial, double gamma) {
  if (!(r1 > 0.0 && r1 < r2 && r2 < r3)) throw PreconditionError("three-ball radii must increase", x0);
  const double j1 = mass(x0, r1);
  const double j2 = mass(x0, r2);
  const double j3 = mass(x0, r3);
  ThreeBallReport rep;
  rep.beta = std::exp(c_trial * gamma * r3) * std::log(r2 / r1) / std::log(r3 / r2);
  rep.lhs = checked_log_ratio(j2, j1);
  rep.rhs = rep.beta * checked_log_ratio(j3, j2) +
            d * ((1.0 + rep.beta) * std::log(r2) - rep.beta * std::log(r3) - std::log(r1)) + c_trial * gamma * r3;
  rep.margin = rep.rhs - rep.lhs;
  return rep;
}

namespace {

class CachedMass {
 public:
  CachedMass(const MassFunction& mass, const Vec& x0) : mass_(mass), x0_(x0) {}
  double operator()(double r) {
    auto it = cache_.find(r);
    if (it != cache_.end()) return it->second;
    const double v = mass_(x0_, r);
    cache_.emplace(r, v);
    return v;
  }
  double index(double r) { return checked_log_ratio((*this)(2.0 * r), (*this)(r)); }

 private:
  const MassFunction& mass_;
  Vec x0_;
  std::map<double, double> cache_;
};

void guard_starshape(const StarshapeGuard& guard, const Vec& x0, double radius) {
  if (guard.domain == nullptr || guard.a == nullptr) return;
  const StarshapeReport s =
      starshape_check(*guard.domain, *guard.a, x0, 8.0 * guard.a->ellipticity() * radius, guard.samples, guard.tolerance);
  if (!s.pass) throw PreconditionError("domain is not A-starshaped about the centre", s.witness);
}

void record(EmpiricalConstant& rep, double r, double small, double large, double t, double tolerance) {
  rep.radii.push_back(r);
  rep.n_small.push_back(small);
  rep.n_large.push_back(large);
  const double drop = small - large;
  rep.max_drop = std::max(rep.max_drop, drop);
  double c = 0.0;
  if (drop > 0.0) {
    if (t > 0.0) {
      c = drop / (t * (large + 1.0));
    } else if (drop > tolerance) {
      c = std::numeric_limits<double>::infinity();
      rep.pass = false;
    }
  }
  rep.c_req.push_back(c);
  rep.c_emp = std::max(rep.c_emp, c);
}

}  // namespace

EmpiricalConstant check_almost_monotonicity(const MassFunction& mass, const Vec& x0, const std::vector<double>& r_grid,
                                            double gamma, double tolerance, const StarshapeGuard& guard) {
  EmpiricalConstant rep;
  if (r_grid.empty()) return rep;
  guard_starshape(guard, x0, *std::max_element(r_grid.begin(), r_grid.end()));
  CachedMass m(mass, x0);
  for (double r : r_grid) record(rep, r, m.index(r), m.index(2.0 * r), gamma * r, tolerance);
  return rep;
}

EmpiricalConstant check_shift(const MassFunction& mass, const Vec& x0, const Vec& x1, double radius, double gamma,
                              double c_star, double tolerance, const StarshapeGuard& guard) {
  const double theta = norm(x1 - x0);
  if (theta > radius / c_star) throw PreconditionError("shift exceeds R / C*", x1);
  guard_starshape(guard, x0, radius);
  EmpiricalConstant rep;
  CachedMass m0(mass, x0);
  CachedMass m1(mass, x1);
  record(rep, radius, m1.index(radius), m0.index(2.0 * radius), gamma * radius + theta / radius, tolerance);
  return rep;
}

EmpiricalConstant check_boundary_doubling(const MassFunction& mass, const GraphDomain& domain, const Vec& x0,
                                          const std::vector<double>& r_grid, double gamma, double tolerance) {
  EmpiricalConstant rep;
  CachedMass m(mass, x0);
  for (double r : r_grid) {
    if (!(r > 0.0) || r >= domain.modulus().r0) throw OutOfRangeError("radius outside (0, r0)");
    record(rep, r, m.index(r), m.index(2.0 * r), gamma * r + domain.modulus()(16.0 * r), tolerance);
  }
  return rep;
}

}  // namespace uclab
