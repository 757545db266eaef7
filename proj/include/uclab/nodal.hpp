#pragma once

#include <string>
#include <vector>

#include "uclab/coefficients.hpp"
#include "uclab/frequency.hpp"
#include "uclab/geometry.hpp"
#include "uclab/solver.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

enum class Verdict { Positive, Negative, SignChanging, Undetermined };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);
inline bool definite(Verdict v) { return v == Verdict::Positive || v == Verdict::Negative; }

/// Closed box or closed ball.
struct Region {
  enum class Kind { Box, Ball };
  Kind kind = Kind::Box;
  Vec lo{};
  Vec hi{};
  Vec center{};
  double radius = 0.0;

  static Region box(const Vec& lo, const Vec& hi);
  static Region ball(const Vec& center, double radius);
  static Region cuboid(const Cuboid& q, int d);

  bool contains(const Vec& x, int d) const;
  void bounds(int d, Vec& lo_out, Vec& hi_out) const;
  std::string describe(int d) const;
};

struct NodalOptions {
  /// Relative margin: a node clears the threshold when |u| > eta sup |u|.
  double eta = 1e-3;
  std::size_t min_nodes = 8;
};

struct SignClassification {
  Region region;
  Verdict verdict = Verdict::Undetermined;
  /// min |u| over tested nodes divided by sup |u|.
  double margin = 0.0;
  double sup = 0.0;
  std::size_t nodes = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

/// Tests the unknown (interior) nodes of the solution inside the region.
SignClassification classify_sign(const GridSolution& u, const Region& region, const NodalOptions& options = {});

struct SignlessBall {
  bool found = false;
  Vec y{};
  double rho = 0.0;
  SignClassification classification;
  std::size_t candidates = 0;
};

/// Boundary candidates y within scale/8 of the anchor, nearest first; the
/// largest radius in rho_grid with a definite verdict wins.
SignlessBall find_signless_ball(const GridSolution& u, const GraphDomain& domain, const Vec& anchor, double scale,
                                std::vector<double> rho_grid, const NodalOptions& options = {},
                                int candidates_per_axis = 17);

struct CuboidCover {
  std::vector<int> nodes;  // descendants whose translates are sign-definite
  std::vector<SignClassification> classifications;  // one per descendant, in tree order
  double fraction = 0.0;
};

/// Classifies the vertical translates of the generation-k descendants of `node`.
CuboidCover signless_cuboid_cover(const GridSolution& u, const GraphDomain& domain, const WhitneyTree& tree, int node,
                                  int k, const NodalOptions& options = {});

struct DropNode {
  int node = -1;
  Vec anchor{};
  double n_star = 0.0;
  bool good = false;
  bool degenerate = false;
  bool starshaped = true;
  std::string flag;
};

struct DropStatistics {
  double root_n_star = 0.0;
  double good_fraction = 0.0;
  double inflation_max = 0.0;
  std::size_t excluded = 0;
  std::size_t starshape_violations = 0;
  std::vector<DropNode> nodes;
};

/// N* = N + 1 at the boundary point below each cuboid centre, at radius S side.
double n_star(const GridSolution& u, const MatrixField& a, const GraphDomain& domain, const Cuboid& q, double s,
              const MassOptions& options, Vec* anchor = nullptr);

DropStatistics doubling_drop_statistics(const GridSolution& u, const MatrixField& a, const GraphDomain& domain,
                                        const WhitneyTree& tree, int root, double s, int k,
                                        const MassOptions& options = {});

}  // namespace uclab
