#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "uclab/linalg.hpp"

namespace uclab {

class MatrixField;

using Field = std::function<double(const Vec&)>;
using VecField = std::function<Vec(const Vec&)>;
using Predicate = std::function<bool(const Vec&)>;

struct Ball {
  Vec center{};
  double radius = 1.0;
  bool contains(const Vec& x) const { return norm(x - center) < radius; }
};

/// omega(rho) from the quasiconvexity condition, valid up to r0.
struct Modulus {
  enum class Kind { Zero, Power, Tabulated };
  Kind kind = Kind::Zero;
  double amplitude = 0.0;
  double exponent = 1.0;
  std::vector<double> rho;
  std::vector<double> value;
  double r0 = 1.0;

  static Modulus zero(double r0 = 1.0);
  static Modulus power(double amplitude, double exponent, double r0 = 1.0);
  static Modulus tabulated(std::vector<double> rho, std::vector<double> value, double r0 = 1.0);

  double operator()(double r) const;
  /// Nondecreasing on a sample grid of (0, r0] and tends to 0 at the origin.
  bool valid(int samples = 256) const;
  std::string describe() const;
};

enum class DomainFamily { Halfplane, Wedge, Sawtooth, Tabulated };
enum class SawtoothProfile { Scallop, Triangle };

/// Boundary values on a uniform grid over the horizontal variables.
/// For d = 3 the table is row-major with the first coordinate fastest.
struct GraphTable {
  Vec lo{};
  double spacing = 1.0;
  int n0 = 0;
  int n1 = 1;
  std::vector<double> values;
};

struct BoundaryPoint {
  Vec x{};
  Vec normal{};
  bool has_normal = true;
  double weight = 1.0;
};

/// The epigraph {x_d > phi(x')} of a Lipschitz function.
class GraphDomain {
 public:
  static GraphDomain halfplane(int d, Modulus modulus = Modulus::zero());
  /// Wedge of opening theta, symmetric about the vertical axis: phi = cot(theta/2)|x'|.
  static GraphDomain wedge(int d, double theta, Modulus modulus = Modulus::zero());
  /// Level k (1..levels) contributes a * 4^-k * S(2^k t) for the scallop
  /// profile S(s) = frac(s)(1 - frac(s)), and a * 2^-k * T(2^k t) for the
  /// triangle profile T(s) = min(frac(s), 1 - frac(s)). In d = 3 the
  /// one-dimensional profile is summed over both horizontal coordinates.
  static GraphDomain sawtooth(int d, double amplitude, int levels, SawtoothProfile profile,
                              Modulus modulus = Modulus::zero());
  static GraphDomain tabulated(int d, GraphTable table, Modulus modulus = Modulus::zero());

  int dim() const { return d_; }
  DomainFamily family() const { return family_; }
  double lipschitz() const { return lipschitz_; }
  const Modulus& modulus() const { return modulus_; }
  const Ball& reference_ball() const { return reference_; }
  void set_reference_ball(const Ball& b) { reference_ = b; }
  double theta() const { return theta_; }
  double amplitude() const { return amplitude_; }
  int levels() const { return levels_; }
  SawtoothProfile profile() const { return profile_; }

  double phi(const Vec& x) const;
  /// Gradient of phi in the horizontal slots. At kinks, the average of the
  /// one-sided partial derivatives.
  Vec grad_phi(const Vec& x) const;
  /// One-sided partial derivative along horizontal axis `axis`; side +1 or -1.
  double one_sided_partial(const Vec& x, int axis, int side) const;
  /// Horizontal distance from x' to the nearest kink of phi (infinity if none).
  double kink_distance(const Vec& x) const;

  double gap(const Vec& x) const { return vertical(x, d_) - phi(x); }
  bool contains(const Vec& x) const { return gap(x) > 0.0; }
  Vec lift(const Vec& xprime) const { return with_vertical(xprime, d_, phi(xprime)); }
  BoundaryPoint boundary_point(const Vec& xprime, double kink_radius = 0.0) const;

  double diameter() const { return 2.0 * reference_.radius; }
  /// 1e-8 times the diameter for closed forms; 10 * spacing * L for tables.
  double default_tolerance() const;
  std::string describe() const;
  std::uint64_t hash() const;

 private:
  double profile_value(double t) const;
  double profile_slope(double t, int side) const;
  double table_value(double a, double b) const;

  int d_ = 2;
  DomainFamily family_ = DomainFamily::Halfplane;
  double lipschitz_ = 0.0;
  Modulus modulus_;
  Ball reference_;
  double theta_ = 0.0;
  double cot_half_ = 0.0;
  double amplitude_ = 0.0;
  int levels_ = 0;
  SawtoothProfile profile_ = SawtoothProfile::Scallop;
  GraphTable table_;
};

std::uint64_t fnv1a(const std::string& text);

struct QuasiconvexityReport {
  double worst_violation = 0.0;
  Vec worst_center{};
  Vec worst_offset{};
  std::size_t samples = 0;
  bool pass = true;
};

/// Around each of `centers` recentring points per horizontal axis, samples
/// `sample_count` offsets per axis with |x'| < r0 and measures
/// -(phi(p+x) - phi(p) - g.x) - |x| omega(|x|), minimised over candidate
/// tangent tilts g built from one-sided slopes.
QuasiconvexityReport quasiconvexity_check(const GraphDomain& domain, int sample_count, int centers = 33,
                                          double tolerance = -1.0);

struct HalfspaceReport {
  Vec normal{};
  double excess = 0.0;
  Vec witness{};
  bool pass = true;
};

HalfspaceReport halfspace_check(const GraphDomain& domain, const Vec& x0_prime, double r, int samples = 2048,
                                double tolerance = -1.0);

struct StarshapeReport {
  double min_value = 0.0;
  Vec witness{};
  std::size_t tested = 0;
  std::size_t skipped_kinks = 0;
  bool pass = true;
};

/// min over sampled boundary points y in B(x0, R) of n(y).A(y)A(x0)^-1(y - x0).
/// `kink_radius` < 0 selects one sample spacing.
StarshapeReport starshape_check(const GraphDomain& domain, const MatrixField& a, const Vec& x0, double radius,
                                int sample_count, double tolerance = 0.0, double kink_radius = -1.0);

bool starshape_sufficiency(const GraphDomain& domain, const MatrixField& a, double side, double s, double t);

struct GraphPatch {
  Vec lo{};
  Vec hi{};
  int cells = 64;
};

struct SpherePatch {
  Vec center{};
  double radius = 1.0;
  int resolution = 256;
};

double surface_integrate(const GraphDomain& domain, const GraphPatch& patch, const Field& f);
/// Integral over the part of the sphere inside the domain.
double surface_integrate(const GraphDomain& domain, const SpherePatch& patch, const Field& f);

/// Midpoint rule in angle for d = 2; Gauss-Legendre in cos(theta) times a
/// uniform azimuthal rule for d = 3. Points failing `inside` are dropped.
double sphere_integrate(int d, const Vec& center, double radius, int resolution, const Predicate& inside,
                        const Field& f);

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace uclab
