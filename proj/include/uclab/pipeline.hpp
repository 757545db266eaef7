#pragma once

#include <string>
#include <vector>

#include "uclab/dimension.hpp"
#include "uclab/frequency.hpp"
#include "uclab/nodal.hpp"
#include "uclab/solver.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

struct PipelineSpec {
  GraphDomain domain = GraphDomain::halfplane(2);
  MatrixField a = MatrixField::identity(2);
  AnalyticSolution data;
  Ball ball{{0.0, 0.0, 0.0}, 1.0};
  double h = 1.0 / 512.0;
  SolveOptions solve;
  double m0 = 2.0;
  int depth = 2;
  double S = 4.0;
  WhitneyOptions whitney;
  CombinatorialParams params;
  bool delta0_empirical = false;
  bool eps_from_s = false;
  NodalOptions nodal;
  MassOptions mass;
  /// Anchors per horizontal axis across the root footprint.
  int anchors_per_axis = 8;
};

struct AnchorBall {
  Vec anchor{};
  SignlessBall ball;
};

struct PipelineResult {
  // solve
  std::size_t unknowns = 0;
  int iterations = 0;
  double solver_residual = 0.0;
  // tree
  WhitneyTree tree;
  WhitneyCertificate certificate;
  std::size_t cuboids = 0;
  // per tree node
  std::vector<NodeData> node_data;
  std::vector<SignClassification> translates;
  DropStatistics drop;
  double delta0_emp = 0.0;
  CombinatorialParams params;
  TreeIndexState index;
  std::vector<AnchorBall> balls;
  double scale = 0.0;  // ball search scale
  // residual
  std::vector<Vec> residual;
  std::size_t residual_samples = 0;
  BoxCountReport residual_counts;
  double slope = 0.0;
  double bound = 0.0;
  bool asserted = false;
  bool pass = true;
};

/// solve, tree, doubling values, nodal verdicts, index recursion, balls and
/// the box-counted residual. Failures are rethrown as StageError.
PipelineResult theorem_pipeline(const PipelineSpec& spec);

}  // namespace uclab
