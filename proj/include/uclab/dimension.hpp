#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uclab/nodal.hpp"
#include "uclab/whitney.hpp"

namespace uclab {

/// Solves delta0/(1-delta0) * (1-alpha)/alpha = 3.
double alpha_from_delta0(double delta0);
/// Solves alpha = log(1+eps0) / (log(1+eps0) + log 2).
double eps0_from_alpha(double alpha);
/// delta0^b (1-delta0)^(1-b) / (b^b (1-b)^(1-b)), extended by 1 - delta0 at b = 0.
double rate_z(double beta, double delta0);

struct CombinatorialParams {
  double delta0 = 0.25;
  double eps = 0.05;
  double n0 = 2.0;
  int K = 4;
  int d = 2;

  double M() const;
  double alpha() const { return alpha_from_delta0(delta0); }
  double eps0() const { return eps0_from_alpha(alpha()); }
  /// Throws ConfigError when a parameter is out of range or eps >= eps0.
  void validate() const;
};

/// Sum over i <= k_max of C(j,i) delta0^i (1-delta0)^(j-i), accumulated in logs.
double binomial_cdf(int j, long long k_max, double delta0);
/// The same with k_max = floor(j beta); 1 for beta >= 1.
double binomial_tail_exact(int j, double beta, double delta0);

struct TailBound {
  double bound = 0.0;
  double exact = 0.0;
  double ratio = 0.0;  // exact / bound
  /// 2 < delta0/(1-delta0) (1-beta)/beta < 4.
  bool regime_ok = false;
};

/// 2 / sqrt(2 pi j beta (1-beta)) z(beta)^j.
TailBound binomial_tail_bound(int j, double beta, double delta0);

struct RatioInequalityReport {
  bool holds = true;
  std::size_t checked = 0;
  int fail_j = -1;
  int fail_k = -1;
};

/// C(j,k-1) (q - p) < p C(j,k) for 1 <= k <= floor(j p/q), 1 <= j <= j_max,
/// with beta = p/q, in exact integer arithmetic.
RatioInequalityReport ratio_inequality_exact(int j_max, long long p, long long q);

/// (d-1)(log M + log z(alpha)) / log M.
double dimension_bound(const CombinatorialParams& params);

enum class GoodMode { Ceil, Floor };

struct SimulationOptions {
  int depth = 8;
  int trials = 1000;
  std::uint64_t seed = 7;
  GoodMode mode = GoodMode::Ceil;
  /// 2 N'(R) / N0, which sets mu_j = log2(root_ratio) / j.
  double root_ratio = 1.0;
};

struct SimulationDepth {
  int depth = 0;
  double fraction = 0.0;
  double sigma = 0.0;
  double survivors = 0.0;   // M^j times the fraction
  double exact_tail = 0.0;  // P(good count < j(alpha + mu_j))
  double stirling_bound = 0.0;
  bool within_3sigma = true;
};

struct SimulationReport {
  int good_children = 0;
  std::vector<SimulationDepth> depths;
  double slope = 0.0;
  double bound = 0.0;
};

/// One uniformly random root-to-leaf path per trial; each node marks a
/// random subset of good children of the configured size.
SimulationReport branching_simulate(const CombinatorialParams& params, const SimulationOptions& options);

struct BoxCountReport {
  std::vector<double> sides;
  std::vector<double> counts;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares slope of log count against log(1/side).
BoxCountReport fit_box_counts(std::vector<double> sides, std::vector<double> counts);

/// Integer cells of side base^-finest in [0,1)^m, counted at each level by
/// integer division.
BoxCountReport box_count_cells(const std::vector<std::array<long long, 2>>& cells, int m, int base, int finest,
                               const std::vector<int>& levels);

/// Points of R^m counted on lattices of the given sides anchored at `origin`.
BoxCountReport box_count_points(const std::vector<Vec>& points, int m, const Vec& origin,
                                const std::vector<double>& sides);

struct NodeData {
  Verdict translate = Verdict::Undetermined;
  double n = 0.0;
  bool has_n = false;
};

struct TreeIndexState {
  std::vector<double> n_prime;  // per tree node; NaN off the step lattice
  std::vector<std::uint8_t> good;
  std::vector<std::uint8_t> case_a;
  std::vector<std::uint8_t> survivor;
  std::vector<double> goodness;  // F_j along the path
  std::vector<std::vector<int>> steps;
  double root_value = 0.0;
  std::size_t undetermined = 0;
  std::size_t audit_checked = 0;
  std::size_t audit_failures = 0;
};

/// Modified doubling index on the nodes at generations 0, K, 2K, ...
TreeIndexState modified_index_recursion(const WhitneyTree& tree, const std::vector<NodeData>& data,
                                        const CombinatorialParams& params);

/// Box counts of the surviving nodes at each step, side 2^-jK times the root side.
BoxCountReport survivor_dimension(const WhitneyTree& tree, const TreeIndexState& state, int K);

}  // namespace uclab
