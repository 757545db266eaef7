#pragma once

#include <optional>
#include <vector>

#include "uclab/coefficients.hpp"
#include "uclab/geometry.hpp"
#include "uclab/solver.hpp"

namespace uclab {

/// ((y-x0).A0^-1 A(y) A0^-1 (y-x0)) / ((y-x0).A0^-1 (y-x0)) with A0 = A(x0).
double weight_mu(const MatrixField& a, const Vec& x0, const Vec& y);
double weight_mu(const Mat& a0_inv, const Mat& ay, const Vec& v);

/// x0 + E(B_r), E the symmetric square root of A(x0).
struct Ellipsoid {
  AffineNormalization map;
  double r = 1.0;
  bool contains(const Vec& y) const { return norm(map.e_inv * (y - map.x0)) < r; }
  /// Half-widths of the axis-aligned bounding box.
  Vec half_extent() const;
};

Ellipsoid ellipsoid_F(const MatrixField& a, const Vec& x0, double r);

struct MassOptions {
  /// 0 selects 48 cells per radius in d = 2 and 24 in d = 3.
  int cells_per_radius = 0;
  /// Subsamples per axis inside cells cut by a boundary.
  int subsamples = 4;
  bool estimate_error = true;
  /// Region where the field is known; quadrature escaping it is an error.
  std::optional<Ball> solved;
};

struct WeightedMass {
  Vec x0{};
  double r = 0.0;
  double value = 0.0;
  std::size_t cells = 0;
  double error = 0.0;
};

/// Integral of f over {inside} within the box anchor ± extent, by midpoint
/// cells of side `cell` anchored at `anchor`; cells whose corners and centre
/// disagree on membership are subsampled.
double cell_quadrature(int d, const Vec& anchor, const Vec& extent, double cell, const Predicate& inside,
                       const Field& f, int subsamples, std::size_t* cells = nullptr);

WeightedMass J(const Field& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
               const MassOptions& options = {});
WeightedMass J(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
               MassOptions options = {});
/// The same mass computed in normalized coordinates as the integral of
/// mu~ u~^2 over B_r ∩ E^-1(domain - x0).
WeightedMass J_normalized(const NormalizedProblem& p, double r, const MassOptions& options = {});

double doubling_index(const Field& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0, double r,
                      const MassOptions& options = {});
double doubling_index(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Vec& x0,
                      double r, MassOptions options = {});

/// r_min * 2^(i/4) for all i with the value not exceeding r_max.
std::vector<double> geometric_grid(double r_min, double r_max);

struct FrequencyOptions {
  int sphere_resolution = 0;  // 0: 4096 in d = 2, 96 in d = 3
  int cells_per_radius = 0;   // 0: 48 in d = 2, 24 in d = 3
  int subsamples = 4;
};

struct FrequencyCurves {
  int d = 2;
  std::vector<double> r;
  std::vector<double> H;
  std::vector<double> D;
  std::vector<double> N;
};

/// H(r) over the sphere part inside the domain, D(r) over the ball part, and
/// the ratio rD/H, all in the normalized coordinates of `p`.
FrequencyCurves frequency(const NormalizedProblem& p, const std::vector<double>& r_grid,
                          const FrequencyOptions& options = {});

struct LogDerivativeReport {
  std::vector<double> r;
  std::vector<double> defect;
  double max_defect = 0.0;
  /// max_defect / gamma, or max_defect itself when gamma = 0.
  double c_emp = 0.0;
};

/// |H'/H - (d-1)/r - 2N/r| at interior grid points, H' by centred
/// differences in log r.
LogDerivativeReport check_H_logderivative(const FrequencyCurves& curves, double gamma);

using MassFunction = std::function<double(const Vec& x0, double r)>;

/// The grid overload keeps a reference to `u`, which must outlive the result.
MassFunction mass_function(const GridSolution& u, const MatrixField& a, const GraphDomain& domain,
                           MassOptions options = {});
MassFunction mass_function(const Field& u, const MatrixField& a, const GraphDomain& domain,
                           MassOptions options = {});

struct ThreeBallReport {
  double beta = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

ThreeBallReport check_three_ball(const MassFunction& mass, int d, const Vec& x0, double r1, double r2, double r3,
                                 double c_trial, double gamma);

struct EmpiricalConstant {
  std::vector<double> radii;
  std::vector<double> n_small;
  std::vector<double> n_large;
  std::vector<double> c_req;
  double c_emp = 0.0;
  double max_drop = 0.0;
  bool pass = true;
};

struct StarshapeGuard {
  const GraphDomain* domain = nullptr;
  const MatrixField* a = nullptr;
  int samples = 512;
  double tolerance = 1e-12;
};

/// Smallest C with N(r) <= (1 + C gamma r) N(2r) + C gamma r on the grid.
/// For gamma = 0 the check is N(r) <= N(2r) + tolerance.
EmpiricalConstant check_almost_monotonicity(const MassFunction& mass, const Vec& x0, const std::vector<double>& r_grid,
                                            double gamma, double tolerance = 0.02,
                                            const StarshapeGuard& guard = {});

/// Smallest C with N(x1, R) <= (1 + C t) N(x0, 2R) + C t, t = gamma R + |x1 - x0|/R.
EmpiricalConstant check_shift(const MassFunction& mass, const Vec& x0, const Vec& x1, double radius, double gamma,
                              double c_star = 8.0, double tolerance = 0.02, const StarshapeGuard& guard = {});

/// Same recipe with t = gamma r + omega(16 r).
EmpiricalConstant check_boundary_doubling(const MassFunction& mass, const GraphDomain& domain, const Vec& x0,
                                          const std::vector<double>& r_grid, double gamma, double tolerance = 0.02);

}  // namespace uclab
