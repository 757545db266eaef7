#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uclab/coefficients.hpp"
#include "uclab/geometry.hpp"

namespace uclab {

/// Uniform node grid; node (i, j, k) sits at lo + h (i, j, k), x fastest.
struct Mesh {
  enum class CellClass { Interior, BoundaryGraph, BoundarySphere, Exterior };

  int d = 2;
  std::array<int, 3> n{1, 1, 1};
  double h = 1.0;
  Vec lo{};

  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(k));
  }
  std::array<int, 3> coords(std::size_t idx) const;
  Vec node(std::size_t idx) const;
  Vec node(const std::array<int, 3>& c) const;

  /// Class of the cell whose lowest corner is node `c`, from its corners and centre.
  CellClass classify_cell(const GraphDomain& domain, const Ball& ball, const std::array<int, 3>& c) const;
  /// Fraction of the cell inside domain ∩ ball, from 4^d subsamples.
  double clipped_fraction(const GraphDomain& domain, const Ball& ball, const std::array<int, 3>& c) const;
};

enum class NodeKind : std::uint8_t { Unknown = 0, Graph = 1, Sphere = 2 };

struct SolveOptions {
  double tol = 1e-10;
  int max_iterations = 200000;
};

/// Nodal values of a discrete solution. Nodes on or below the graph hold 0,
/// nodes outside the ball hold the boundary data.
class GridSolution {
 public:
  Mesh mesh;
  Ball ball;
  std::vector<double> values;
  std::vector<NodeKind> kind;
  /// Node lies above the graph or within h/2 below it.
  std::vector<std::uint8_t> valid;
  double residual = 0.0;
  int iterations = 0;
  std::vector<double> history;
  std::uint64_t domain_hash = 0;
  std::string config_json;

  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
  Vec nodal_gradient(const std::array<int, 3>& c) const;
  std::size_t unknown_count() const;

  /// The returned callables refer to this object, which must outlive them.
  Field field() const;
  VecField gradient_field() const;

 private:
  void locate(const Vec& x, std::array<int, 3>& base, std::array<double, 3>& w) const;
};

/// -div(A grad u) = 0 in ball ∩ domain, u = 0 on the graph, u = g outside the ball.
GridSolution solve(const GraphDomain& domain, const MatrixField& a, const Ball& ball, const Field& g, double h,
                   const SolveOptions& options = {});

Vec gradient(const GridSolution& sol, const Vec& x);

/// max |A u - b| / max |b| over unknown rows, recomputed from scratch.
double discrete_residual(const GridSolution& sol, const MatrixField& a);

void write_checkpoint(const GridSolution& sol, const std::string& path);
GridSolution read_checkpoint(const std::string& path);

struct AnalyticSolution {
  std::string name;
  Field u;
  VecField grad;
  double degree = 0.0;
  bool homogeneous = true;
  Mat paired;
};

/// halfplane_harmonic_k {k [, d]}: Im((x1 + i x_d)^k).
/// wedge_harmonic {theta}: r^(pi/theta) sin(pi psi/theta), psi measured from
/// the right edge of {x2 > cot(theta/2)|x1|}, zero outside the wedge.
/// constant_coefficient_affine_image {k, e11, e12, e22}: Im of the halfplane
/// harmonic pulled back by E^-1, paired with A = E^2.
AnalyticSolution analytic_library(const std::string& name, const std::vector<double>& params);

/// ca * a + cb * b.
AnalyticSolution combine(const AnalyticSolution& a, double ca, const AnalyticSolution& b, double cb);

}  // namespace uclab
