#include "uclab/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace uclab {

Mat Mat::identity(int dim) {
  Mat m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(int dim, const Vec& diag) {
  Mat m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
  return m;
}

Mat Mat::transpose() const {
  Mat t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(i, j) = (*this)(j, i);
  return t;
}

double Mat::determinant() const {
  const Mat& m = *this;
  if (dim_ == 1) return m(0, 0);
  if (dim_ == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

Mat Mat::inverse() const {
  const Mat& m = *this;
  const double det = determinant();
  if (det == 0.0) throw std::domain_error("singular matrix");
  Mat r(dim_);
  if (dim_ == 1) {
    r(0, 0) = 1.0 / det;
  } else if (dim_ == 2) {
    r(0, 0) = m(1, 1) / det;
    r(0, 1) = -m(0, 1) / det;
    r(1, 0) = -m(1, 0) / det;
    r(1, 1) = m(0, 0) / det;
  } else {
    r(0, 0) = (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) / det;
    r(0, 1) = (m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2)) / det;
    r(0, 2) = (m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1)) / det;
    r(1, 0) = (m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2)) / det;
    r(1, 1) = (m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0)) / det;
    r(1, 2) = (m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2)) / det;
    r(2, 0) = (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0)) / det;
    r(2, 1) = (m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1)) / det;
    r(2, 2) = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) / det;
  }
  return r;
}

double Mat::asymmetry() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

double Mat::frobenius() const {
  double s = 0.0;
  for (double v : a_) s += v * v;
  return std::sqrt(s);
}

Mat operator*(const Mat& a, const Mat& b) {
  Mat c(a.dim_);
  for (int i = 0; i < a.dim_; ++i)
    for (int j = 0; j < a.dim_; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.dim_; ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Vec operator*(const Mat& a, const Vec& x) {
  Vec y{};
  for (int i = 0; i < a.dim_; ++i) {
    double s = 0.0;
    for (int k = 0; k < a.dim_; ++k) s += a(i, k) * x[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

Mat operator+(const Mat& a, const Mat& b) {
  Mat c(a.dim_);
  for (std::size_t i = 0; i < 9; ++i) c.a_[i] = a.a_[i] + b.a_[i];
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  Mat c(a.dim_);
  for (std::size_t i = 0; i < 9; ++i) c.a_[i] = a.a_[i] - b.a_[i];
  return c;
}

Mat operator*(double s, const Mat& a) {
  Mat c(a.dim_);
  for (std::size_t i = 0; i < 9; ++i) c.a_[i] = s * a.a_[i];
  return c;
}

SymmetricEigen jacobi_eigen(const Mat& input, double tol, int max_sweeps) {
  const int n = input.dim();
  Mat a = input;
  Mat v = Mat::identity(n);
  const double total = std::max(a.frobenius(), 1e-300);
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= tol * total) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  // Ascending order, carrying eigenvector columns along.
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.begin() + n, [&](int i, int j) { return a(i, i) < a(j, j); });
  SymmetricEigen out;
  out.vectors = Mat(n);
  out.sweeps = sweep;
  for (int c = 0; c < n; ++c) {
    out.values[static_cast<std::size_t>(c)] = a(order[static_cast<std::size_t>(c)], order[static_cast<std::size_t>(c)]);
    for (int r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[static_cast<std::size_t>(c)]);
  }
  return out;
}

double symmetric_norm(const Mat& a) {
  const SymmetricEigen e = jacobi_eigen(a);
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(e.values[static_cast<std::size_t>(i)]));
  return m;
}

}  // namespace uclab
