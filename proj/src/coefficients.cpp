#include "uclab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "uclab/error.hpp"
#include "uclab/solver.hpp"

namespace uclab {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void put_matrix(std::ostringstream& os, const Mat& m) {
  os << "[";
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j) os << (i + j ? "," : "") << fmt_double(m(i, j));
  os << "]";
}

double spectral_ellipticity(const Mat& a) {
  const SymmetricEigen e = jacobi_eigen(a);
  const double lo = e.values[0];
  const double hi = e.values[static_cast<std::size_t>(a.dim() - 1)];
  if (lo <= 0.0) throw EllipticityViolation("coefficient matrix is not positive definite");
  return std::max(hi, 1.0 / lo);
}

double radical_inverse(int index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

MatrixField MatrixField::identity(int d) { return constant(Mat::identity(d)); }

MatrixField MatrixField::constant(const Mat& a) {
  MatrixField f;
  f.d_ = a.dim();
  f.kind_ = Kind::Constant;
  f.base_ = a;
  f.ellipticity_ = spectral_ellipticity(a);
  f.lipschitz_ = 0.0;
  return f;
}

MatrixField MatrixField::modulated(const Mat& rotation, const Vec& eps, const Mat& waves) {
  MatrixField f;
  f.d_ = rotation.dim();
  f.kind_ = Kind::Modulated;
  f.rotation_ = rotation;
  f.eps_ = eps;
  f.waves_ = waves;
  double lam = 1.0;
  double gam = 0.0;
  for (int i = 0; i < f.d_; ++i) {
    const double e = std::abs(eps[static_cast<std::size_t>(i)]);
    if (e >= 1.0) throw ConfigError("modulation amplitude must be below 1");
    lam = std::max({lam, 1.0 + e, 1.0 / (1.0 - e)});
    double k = 0.0;
    for (int j = 0; j < f.d_; ++j) k += waves(i, j) * waves(i, j);
    gam = std::max(gam, e * std::sqrt(k));
  }
  f.ellipticity_ = lam;
  f.lipschitz_ = gam;
  return f;
}

MatrixField MatrixField::affine(const Mat& a0, const std::array<Mat, 3>& slopes, double ellipticity) {
  MatrixField f;
  f.d_ = a0.dim();
  f.kind_ = Kind::Affine;
  f.base_ = a0;
  f.slopes_ = slopes;
  for (int j = 0; j < f.d_; ++j)
    if (f.slopes_[static_cast<std::size_t>(j)].dim() == 0) f.slopes_[static_cast<std::size_t>(j)] = Mat(f.d_);
  double sq = 0.0;
  for (int j = 0; j < f.d_; ++j) {
    const double n = symmetric_norm(f.slopes_[static_cast<std::size_t>(j)]);
    sq += n * n;
  }
  f.ellipticity_ = ellipticity;
  f.lipschitz_ = std::sqrt(sq);
  return f;
}

MatrixField MatrixField::tabulated(int d, const Vec& lo, double spacing, const std::array<int, 3>& n,
                                   std::vector<Mat> values, double ellipticity, double lipschitz) {
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(n[static_cast<std::size_t>(i)]);
  if (values.size() != count) throw ConfigError("tabulated coefficient table has the wrong size");
  MatrixField f;
  f.d_ = d;
  f.kind_ = Kind::Tabulated;
  f.lo_ = lo;
  f.spacing_ = spacing;
  f.n_ = n;
  for (int i = d; i < 3; ++i) f.n_[static_cast<std::size_t>(i)] = 1;
  f.table_ = std::move(values);
  f.ellipticity_ = ellipticity;
  f.lipschitz_ = lipschitz;
  return f;
}

Mat MatrixField::operator()(const Vec& x) const {
  switch (kind_) {
    case Kind::Constant:
      return base_;
    case Kind::Modulated: {
      Vec diag{};
      for (int i = 0; i < d_; ++i) {
        double phase = 0.0;
        for (int j = 0; j < d_; ++j) phase += waves_(i, j) * x[static_cast<std::size_t>(j)];
        diag[static_cast<std::size_t>(i)] = 1.0 + eps_[static_cast<std::size_t>(i)] * std::sin(phase);
      }
      return rotation_.transpose() * Mat::diagonal(d_, diag) * rotation_;
    }
    case Kind::Affine: {
      Mat a = base_;
      for (int j = 0; j < d_; ++j) a = a + x[static_cast<std::size_t>(j)] * slopes_[static_cast<std::size_t>(j)];
      return a;
    }
    case Kind::Tabulated: {
      std::array<int, 3> idx{0, 0, 0};
      std::array<double, 3> w{0.0, 0.0, 0.0};
      for (int i = 0; i < d_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double f = (x[ui] - lo_[ui]) / spacing_;
        if (f < -1e-9 || f > n_[ui] - 1 + 1e-9) throw OutOfRangeError("coefficient table queried outside its range");
        idx[ui] = std::clamp(static_cast<int>(std::floor(f)), 0, std::max(n_[ui] - 2, 0));
        w[ui] = std::clamp(f - idx[ui], 0.0, 1.0);
      }
      Mat a(d_);
      const int corners = 1 << d_;
      for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        std::array<int, 3> at = idx;
        for (int i = 0; i < d_; ++i) {
          const auto ui = static_cast<std::size_t>(i);
          const bool up = (c >> i) & 1;
          weight *= up ? w[ui] : 1.0 - w[ui];
          if (up) at[ui] = std::min(at[ui] + 1, n_[ui] - 1);
        }
        if (weight == 0.0) continue;
        const std::size_t k = static_cast<std::size_t>(at[0] + n_[0] * (at[1] + n_[1] * at[2]));
        a = a + weight * table_[k];
      }
      return a;
    }
  }
  return base_;
}

std::string MatrixField::describe() const {
  std::ostringstream os;
  os << "d=" << d_ << ";";
  switch (kind_) {
    case Kind::Constant:
      os << "constant:";
      put_matrix(os, base_);
      break;
    case Kind::Modulated:
      os << "modulated:";
      put_matrix(os, rotation_);
      os << ":" << fmt_double(eps_[0]) << "," << fmt_double(eps_[1]) << "," << fmt_double(eps_[2]) << ":";
      put_matrix(os, waves_);
      break;
    case Kind::Affine:
      os << "affine:";
      put_matrix(os, base_);
      for (int j = 0; j < d_; ++j) put_matrix(os, slopes_[static_cast<std::size_t>(j)]);
      break;
    case Kind::Tabulated:
      os << "tabulated:" << n_[0] << "x" << n_[1] << "x" << n_[2] << ":" << fmt_double(spacing_);
      for (const Mat& m : table_) put_matrix(os, m);
      break;
  }
  os << ";Lambda=" << fmt_double(ellipticity_) << ";gamma=" << fmt_double(lipschitz_);
  return os.str();
}

std::vector<Vec> halton_points(int d, int count, const Vec& lo, const Vec& hi) {
  static const int bases[3] = {2, 3, 5};
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    Vec p{};
    for (int k = 0; k < d; ++k) {
      const auto uk = static_cast<std::size_t>(k);
      p[uk] = lo[uk] + (hi[uk] - lo[uk]) * radical_inverse(i, bases[k]);
    }
    pts.push_back(p);
  }
  return pts;
}

CertifyReport certify(const MatrixField& field, const std::vector<Vec>& samples, double offset) {
  CertifyReport r;
  const int d = field.dim();
  r.lambda_emp = 1.0;
  std::vector<Vec> dirs;
  for (int i = 0; i < d; ++i) {
    Vec e{};
    e[static_cast<std::size_t>(i)] = 1.0;
    dirs.push_back(e);
  }
  Vec diag{};
  for (int i = 0; i < d; ++i) diag[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(static_cast<double>(d));
  dirs.push_back(diag);

  auto ratio = [&](const Vec& x, const Vec& y, const Mat& ax) {
    const double dist = norm(x - y);
    if (dist == 0.0) return;
    const Mat diff = ax - field(y);
    r.gamma_emp = std::max(r.gamma_emp, symmetric_norm(diff) / dist);
    ++r.pairs;
  };

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec& x = samples[i];
    const Mat a = field(x);
    if (a.asymmetry() > 1e-12 * std::max(1.0, a.frobenius())) {
      r.symmetric = false;
      throw AssumptionViolation("coefficient matrix is not symmetric at a sample");
    }
    r.lambda_emp = std::max(r.lambda_emp, spectral_ellipticity(a));
    if (i + 1 < samples.size()) ratio(x, samples[i + 1], a);
    for (const Vec& e : dirs) ratio(x, x + offset * e, a);
  }
  const double slack = 1e-12;
  r.pass = r.lambda_emp <= field.ellipticity() * (1.0 + slack) && r.gamma_emp <= field.lipschitz() * (1.0 + slack) + slack;
  return r;
}

AffineNormalization sqrt_at(const MatrixField& field, const Vec& x0, double tolerance) {
  const Mat a = field(x0);
  const int d = a.dim();
  if (a.asymmetry() > 1e-12 * std::max(1.0, a.frobenius())) throw AssumptionViolation("A(x0) is not symmetric");
  const SymmetricEigen eig = jacobi_eigen(a);
  if (eig.values[0] < 1.0 / field.ellipticity() - tolerance)
    throw EllipticityViolation("eigenvalue of A(x0) below the declared ellipticity bound");
  Vec root{};
  Vec inv_root{};
  double sqrt_det = 1.0;
  for (int i = 0; i < d; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    root[ui] = std::sqrt(eig.values[ui]);
    inv_root[ui] = 1.0 / root[ui];
    sqrt_det *= root[ui];
  }
  const Mat& o = eig.vectors;
  AffineNormalization n;
  n.x0 = x0;
  n.a0 = a;
  n.e = o * Mat::diagonal(d, root) * o.transpose();
  n.e_inv = o * Mat::diagonal(d, inv_root) * o.transpose();
  // Symmetrize away rounding.
  n.e = 0.5 * (n.e + n.e.transpose());
  n.e_inv = 0.5 * (n.e_inv + n.e_inv.transpose());
  n.sqrt_det = sqrt_det;
  return n;
}

NormalizedProblem normalize(const MatrixField& field, const GraphDomain& domain, Field u, VecField grad_u,
                            const Vec& x0) {
  NormalizedProblem p;
  p.map = sqrt_at(field, x0);
  p.d = domain.dim();
  const AffineNormalization map = p.map;
  p.contains = [map, domain](const Vec& z) { return domain.contains(map.x0 + map.e * z); };
  p.a_tilde = [map, field](const Vec& z) { return map.e_inv * field(map.x0 + map.e * z) * map.e_inv; };
  p.u = [map, u](const Vec& z) { return u(map.x0 + map.e * z); };
  p.grad_u = [map, grad_u](const Vec& z) { return map.e * grad_u(map.x0 + map.e * z); };
  return p;
}

NormalizedProblem normalize(const MatrixField& field, const GraphDomain& domain, const GridSolution& u,
                            const Vec& x0) {
  return normalize(field, domain, u.field(), u.gradient_field(), x0);
}

}  // namespace uclab
