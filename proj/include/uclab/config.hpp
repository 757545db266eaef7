#pragma once

#include <cstdint>
#include <string>

#include "uclab/pipeline.hpp"

namespace uclab {

inline constexpr const char* kVersion = "0.1.0";

/// Flat INI configuration. Lengths are in domain units, angles in radians.
struct RunConfig {
  // [domain]
  std::string family = "halfplane";  // halfplane | wedge | sawtooth
  int d = 2;
  double theta = 1.5707963267948966;
  double amplitude = 0.5;
  int levels = 6;
  std::string profile = "scallop";  // scallop | triangle
  std::string modulus = "zero";     // zero | power
  double modulus_amplitude = 0.0;
  double modulus_exponent = 1.0;
  double r0 = 1.0;

  // [coefficients]
  std::string coefficients = "identity";  // identity | constant | modulated
  double a11 = 1.0, a12 = 0.0, a13 = 0.0, a22 = 1.0, a23 = 0.0, a33 = 1.0;
  Vec eps{0.0, 0.0, 0.0};
  Vec wave{0.0, 0.0, 0.0};  // wave vector shared by all modulated axes

  // [solver]
  double ball_radius = 1.0;
  Vec ball_center{0.0, 0.0, 0.0};
  double h = 1.0 / 512.0;
  double tol = 1e-10;
  int max_iterations = 200000;
  /// Terms "coef*name:p1,p2" joined by '+', e.g. "halfplane_harmonic:2".
  std::string data = "halfplane_harmonic:2";

  // [tree]
  double m0 = 2.0;
  double kappa = 32.0;
  double W = 0.0;
  int depth = 2;
  int K = 1;
  double S = 4.0;

  // [combinatorial]
  std::string delta0 = "0.25";  // number or "empirical"
  double n0 = 2.0;
  std::string eps_mode = "0.05";  // number or "from-S"

  // [nodal]
  double eta = 1e-3;

  // [run]
  std::uint64_t seed = 7;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Range checks; throws ConfigError.
void validate(const RunConfig& cfg);

/// Canonical JSON text of every field, keys sorted.
std::string canonical_json(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string hex_hash(std::uint64_t h);

GraphDomain make_domain(const RunConfig& cfg);
MatrixField make_coefficients(const RunConfig& cfg);
AnalyticSolution make_data(const std::string& expr, int d);
PipelineSpec make_spec(const RunConfig& cfg);

}  // namespace uclab
