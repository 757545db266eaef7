#pragma once

#include <array>
#include <string>
#include <vector>

#include "uclab/geometry.hpp"
#include "uclab/linalg.hpp"

namespace uclab {

class GridSolution;

/// Symmetric coefficient field x -> A(x) with declared ellipticity and
/// Lipschitz constants.
class MatrixField {
 public:
  enum class Kind { Constant, Modulated, Affine, Tabulated };

  static MatrixField identity(int d);
  /// Declared constants default to the exact values of the matrix.
  static MatrixField constant(const Mat& a);
  /// R^T diag(1 + eps_i sin(k_i . x)) R, with k_i the i-th row of `waves`.
  static MatrixField modulated(const Mat& rotation, const Vec& eps, const Mat& waves);
  /// A0 + sum_j x_j A_j.
  static MatrixField affine(const Mat& a0, const std::array<Mat, 3>& slopes, double ellipticity);
  /// Multilinear interpolation of matrices on a uniform node grid, x fastest.
  static MatrixField tabulated(int d, const Vec& lo, double spacing, const std::array<int, 3>& n,
                               std::vector<Mat> values, double ellipticity, double lipschitz);

  Mat operator()(const Vec& x) const;
  int dim() const { return d_; }
  Kind kind() const { return kind_; }
  double ellipticity() const { return ellipticity_; }
  double lipschitz() const { return lipschitz_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  void declare(double ellipticity, double lipschitz) {
    ellipticity_ = ellipticity;
    lipschitz_ = lipschitz;
  }
  std::string describe() const;

 private:
  int d_ = 2;
  Kind kind_ = Kind::Constant;
  double ellipticity_ = 1.0;
  double lipschitz_ = 0.0;
  Mat base_;
  Mat rotation_;
  Vec eps_{};
  Mat waves_;
  std::array<Mat, 3> slopes_{};
  Vec lo_{};
  double spacing_ = 1.0;
  std::array<int, 3> n_{1, 1, 1};
  std::vector<Mat> table_;
};

/// Halton sequence in the box [lo, hi] (bases 2, 3, 5).
std::vector<Vec> halton_points(int d, int count, const Vec& lo, const Vec& hi);

struct CertifyReport {
  double lambda_emp = 1.0;
  double gamma_emp = 0.0;
  bool symmetric = true;
  bool pass = true;
  std::size_t pairs = 0;
};

/// Lambda_emp from the spectra at `samples`; gamma_emp from consecutive
/// sample pairs plus pairs offset by `offset` along each axis and diagonal.
CertifyReport certify(const MatrixField& field, const std::vector<Vec>& samples, double offset = 1e-4);

struct AffineNormalization {
  Vec x0{};
  Mat a0;
  Mat e;
  Mat e_inv;
  double sqrt_det = 1.0;
};

AffineNormalization sqrt_at(const MatrixField& field, const Vec& x0, double tolerance = 1e-12);

/// The problem seen in the coordinates z with x = x0 + E z.
struct NormalizedProblem {
  AffineNormalization map;
  int d = 2;
  Predicate contains;
  std::function<Mat(const Vec&)> a_tilde;
  Field u;
  VecField grad_u;

  Vec to_physical(const Vec& z) const { return map.x0 + map.e * z; }
  Vec to_normalized(const Vec& x) const { return map.e_inv * (x - map.x0); }
};

NormalizedProblem normalize(const MatrixField& field, const GraphDomain& domain, Field u, VecField grad_u,
                            const Vec& x0);
NormalizedProblem normalize(const MatrixField& field, const GraphDomain& domain, const GridSolution& u,
                            const Vec& x0);

}  // namespace uclab
