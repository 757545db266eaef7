#pragma once

// Fixed-size vectors and symmetric matrices for dimensions 2 and 3.
// Unused trailing components are kept at zero so that dot products and
// norms are dimension-agnostic.

#include <array>
#include <cmath>
#include <cstddef>

namespace uclab {

using Vec = std::array<double, 3>;

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Horizontal part x' of a point in dimension d (vertical coordinate zeroed).
inline Vec horizontal(const Vec& x, int d) {
  Vec h = x;
  h[static_cast<std::size_t>(d - 1)] = 0.0;
  return h;
}

inline double vertical(const Vec& x, int d) { return x[static_cast<std::size_t>(d - 1)]; }

inline Vec with_vertical(Vec x, int d, double value) {
  x[static_cast<std::size_t>(d - 1)] = value;
  return x;
}

class Mat {
 public:
  Mat() = default;
  explicit Mat(int dim) : dim_(dim) {}

  static Mat identity(int dim);
  static Mat diagonal(int dim, const Vec& diag);

  int dim() const { return dim_; }
  double& operator()(int i, int j) { return a_[static_cast<std::size_t>(3 * i + j)]; }
  double operator()(int i, int j) const { return a_[static_cast<std::size_t>(3 * i + j)]; }

  Mat transpose() const;
  double determinant() const;
  Mat inverse() const;
  /// Largest absolute entry of A - A^T.
  double asymmetry() const;
  double frobenius() const;

  friend Mat operator*(const Mat& a, const Mat& b);
  friend Vec operator*(const Mat& a, const Vec& x);
  friend Mat operator+(const Mat& a, const Mat& b);
  friend Mat operator-(const Mat& a, const Mat& b);
  friend Mat operator*(double s, const Mat& a);

 private:
  int dim_ = 0;
  std::array<double, 9> a_{};
};

/// Eigendecomposition A = V diag(values) V^T of a symmetric matrix.
/// Columns of `vectors` are the eigenvectors; values are ascending.
struct SymmetricEigen {
  Vec values{};
  Mat vectors;
  int sweeps = 0;
};

/// Cyclic Jacobi rotations with a fixed (p, q) sweep order. Stops once the
/// off-diagonal Frobenius mass falls below `tol` times the total mass.
SymmetricEigen jacobi_eigen(const Mat& a, double tol = 1e-14, int max_sweeps = 64);

/// Spectral norm of a symmetric matrix.
double symmetric_norm(const Mat& a);

}  // namespace uclab
