#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "uclab/geometry.hpp"

namespace uclab {

/// Axis-aligned box of horizontal side `side` and vertical extent
/// stretch * side, centred at `center`.
struct Cuboid {
  Vec center{};
  double side = 1.0;
  double stretch = 1.0;
  int level = 0;

  double height() const { return stretch * side; }
  /// Vertical bounds of the dilate about the centre.
  double bottom(int d, double dilation = 1.0) const { return center[static_cast<std::size_t>(d - 1)] - dilation * height() / 2.0; }
  double top(int d, double dilation = 1.0) const { return center[static_cast<std::size_t>(d - 1)] + dilation * height() / 2.0; }
  bool contains(const Vec& x, int d) const;
};

/// The (d-1)-cube Π(Q) = [lo, lo + side)^(d-1).
struct Footprint {
  Vec lo{};
  double side = 1.0;
  Vec center(int d) const;
  bool contains(const Vec& x, int d) const;
  double measure(int d) const;
};

struct WhitneyOptions {
  /// A cuboid is kept when kappa Q lies in the domain and its parent's does not.
  double kappa = 32.0;
  /// Boundary-touch dilation; 0 selects 2 kappa + 1.
  double W = 0.0;
  /// Samples per horizontal axis when bounding phi over a footprint; 0 selects 33 (d=2) or 9 (d=3).
  int sup_samples = 0;
};

struct WhitneyCertificate {
  bool inside = true;          // 10Q inside the domain
  bool touches = true;         // WQ meets the boundary
  bool bounded_overlap = true; // neighbour sizes within a factor 2
  std::size_t inside_failures = 0;
  std::size_t touch_failures = 0;
  std::size_t ratio_failures = 0;
  int d0 = 0;
  double dist_ratio_min = 0.0;
  double dist_ratio_max = 0.0;
  bool pass() const { return inside && touches && bounded_overlap; }
};

class WhitneyDecomposition {
 public:
  GraphDomain domain;
  Ball ball;
  double kappa = 32.0;
  double W = 65.0;
  double min_scale = 0.0;
  double top_side = 1.0;
  int sup_samples = 33;
  std::vector<Cuboid> cuboids;
  std::size_t slivers = 0;
  double uncovered_fraction = 0.0;
  WhitneyCertificate certificate;

  double stretch() const { return 1.0 + domain.lipschitz(); }
};

/// Sampled bound on sup (or inf, sign = -1) of phi over a horizontal square
/// with a Lipschitz slack for the gaps between samples.
double phi_bound(const GraphDomain& domain, const Vec& centre, double half_width, int samples, int sign);

WhitneyDecomposition decompose(const GraphDomain& domain, const Ball& ball, double min_scale,
                               const WhitneyOptions& options = {});
WhitneyCertificate certify_whitney(const WhitneyDecomposition& dec);

struct TreeNode {
  Cuboid q;
  int generation = 0;
  int parent = -1;
  std::vector<int> children;
};

class WhitneyTree {
 public:
  int d = 2;
  int depth = 0;
  std::vector<TreeNode> nodes;
  std::vector<std::vector<int>> generations;

  const TreeNode& root() const { return nodes.front(); }
};

/// Root: the largest cuboid inside (M0/2) B0; ties go to the smallest
/// horizontal offset from the centre of B0, then the lowest centre, then
/// lexicographic order. Representatives are the lowest cuboid below the root
/// with the required footprint.
WhitneyTree build_tree(const WhitneyDecomposition& dec, const Ball& b0, double m0, int depth);

struct TreeBuild {
  WhitneyDecomposition dec;
  WhitneyTree tree;
};

/// Decomposes coarsely to locate the root, then refines down to
/// root side * 2^-depth so every generation has representatives.
TreeBuild decompose_for_tree(const GraphDomain& domain, const Ball& ball, const Ball& b0, double m0, int depth,
                             const WhitneyOptions& options = {});

Footprint project(const Cuboid& q, int d);
/// Membership in the cylinder Π^-1(Π(Q)).
bool in_cylinder(const Cuboid& q, const Vec& x, int d);
/// Vertical translate of Q whose centre lies on the graph.
Cuboid vertical_translate(const Cuboid& q, const GraphDomain& domain);
std::vector<int> descendants(const WhitneyTree& tree, int node, int j);

/// Cuboids meeting the graph raised by `shift`.
std::vector<int> layer_query(const WhitneyDecomposition& dec, double shift);

/// Exact check that each generation's footprints tile the root footprint.
bool partition_exact(const WhitneyTree& tree);

std::string serialize_tree(const WhitneyTree& tree);
WhitneyTree parse_tree(const std::string& text);

}  // namespace uclab
