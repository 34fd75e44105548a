#include "alee/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "alee/error.hpp"

namespace alee {

namespace {

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw InvalidInput("dimension " + std::to_string(dim) + " outside [0, " +
                       std::to_string(kMaxDim) + "]");
  }
}

void check_same(int a, int b) {
  if (a != b) {
    throw InvalidInput("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Vec

Vec::Vec(int dim) : dim_(dim) { check_dim(dim); }

Vec::Vec(std::initializer_list<double> values) : dim_(static_cast<int>(values.size())) {
  check_dim(dim_);
  std::copy(values.begin(), values.end(), v_.begin());
}

Vec Vec::unit(int dim, int k) {
  Vec e(dim);
  e[k] = 1.0;
  return e;
}

double Vec::dot(const Vec& other) const {
  check_same(dim_, other.dim_);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += v_[i] * other.v_[i];
  return s;
}

double Vec::norm() const { return std::sqrt(squared_norm()); }

double Vec::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_; ++i) m = std::max(m, std::abs(v_[i]));
  return m;
}

bool Vec::all_finite() const {
  return std::all_of(v_.begin(), v_.begin() + dim_, [](double x) { return std::isfinite(x); });
}

Vec& Vec::operator+=(const Vec& other) {
  check_same(dim_, other.dim_);
  for (int i = 0; i < dim_; ++i) v_[i] += other.v_[i];
  return *this;
}

Vec& Vec::operator-=(const Vec& other) {
  check_same(dim_, other.dim_);
  for (int i = 0; i < dim_; ++i) v_[i] -= other.v_[i];
  return *this;
}

Vec& Vec::operator*=(double s) {
  for (int i = 0; i < dim_; ++i) v_[i] *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(int dim) : dim_(dim) { check_dim(dim); }

Matrix::Matrix(int dim, std::initializer_list<double> row_major) : dim_(dim) {
  check_dim(dim);
  if (static_cast<int>(row_major.size()) != dim * dim) {
    throw InvalidInput("expected " + std::to_string(dim * dim) + " entries");
  }
  auto it = row_major.begin();
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) (*this)(i, j) = *it++;
}

Matrix Matrix::identity(int dim) {
  Matrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vec Matrix::column(int j) const {
  Vec c(dim_);
  for (int i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
  return c;
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) m = std::max(m, std::abs((*this)(i, j)));
  return m;
}

bool Matrix::all_finite() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      if (!std::isfinite((*this)(i, j))) return false;
  return true;
}

Matrix& Matrix::add_outer(const Vec& a, const Vec& b, double scale) {
  check_same(dim_, a.dim());
  check_same(dim_, b.dim());
  for (int i = 0; i < dim_; ++i) {
    const double ai = scale * a[i];
    for (int j = 0; j < dim_; ++j) (*this)(i, j) += ai * b[j];
  }
  return *this;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  check_same(dim_, other.dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) += other(i, j);
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  check_same(dim_, other.dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) -= other(i, j);
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) (*this)(i, j) *= s;
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  check_same(a.dim(), b.dim());
  const int d = a.dim();
  Matrix c(d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) {
      const double aik = a(i, k);
      for (int j = 0; j < d; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

Vec operator*(const Matrix& a, const Vec& x) {
  check_same(a.dim(), x.dim());
  const int d = a.dim();
  Vec y(d);
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(int dim) : m_(dim) {}

SymMatrix::SymMatrix(int dim, std::initializer_list<double> row_major)
    : SymMatrix(Matrix(dim, row_major)) {}

SymMatrix::SymMatrix(const Matrix& m) : m_(m.dim()) {
  const int d = m.dim();
  for (int i = 0; i < d; ++i) {
    m_(i, i) = m(i, i);
    for (int j = i + 1; j < d; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
}

SymMatrix SymMatrix::identity(int dim, double scale) {
  SymMatrix s(dim);
  for (int i = 0; i < dim; ++i) s.m_(i, i) = scale;
  return s;
}

SymMatrix SymMatrix::diagonal(const Vec& diag) {
  SymMatrix s(diag.dim());
  for (int i = 0; i < diag.dim(); ++i) s.m_(i, i) = diag[i];
  return s;
}

void SymMatrix::set(int i, int j, double value) {
  m_(i, j) = value;
  m_(j, i) = value;
}

SymMatrix& SymMatrix::add_outer(const Vec& x, double scale) {
  check_same(dim(), x.dim());
  const int d = dim();
  for (int i = 0; i < d; ++i) {
    const double xi = scale * x[i];
    m_(i, i) += xi * x[i];
    for (int j = i + 1; j < d; ++j) {
      const double v = m_(i, j) + xi * x[j];
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
  return *this;
}

double SymMatrix::quad_form(const Vec& x) const { return x.dot(m_ * x); }

double SymMatrix::trace() const {
  double t = 0.0;
  for (int i = 0; i < dim(); ++i) t += m_(i, i);
  return t;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
  m_ += other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& other) {
  m_ -= other.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Decompositions

EigenDecomposition sym_eigen(const SymMatrix& m) {
  if (!m.all_finite()) throw InvalidInput("sym_eigen: non-finite entries");
  const int d = m.dim();
  Matrix a = m.as_matrix();
  Matrix q = Matrix::identity(d);

  double frob2 = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) frob2 += a(i, j) * a(i, j);
  const double tol = 1e-14 * std::sqrt(frob2);

  auto off_norm = [&] {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (int p = 0; p < d - 1; ++p) {
      for (int r = p + 1; r < d; ++r) {
        const double apr = a(p, r);
        if (apr == 0.0) continue;
        // Rotation annihilating a(p, r); stable tangent from Golub & Van Loan 8.5.2.
        const double tau = (a(r, r) - a(p, p)) / (2.0 * apr);
        const double t = std::copysign(1.0, tau) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akr = a(k, r);
          a(k, p) = c * akp - s * akr;
          a(k, r) = s * akp + c * akr;
        }
        for (int k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double ark = a(r, k);
          a(p, k) = c * apk - s * ark;
          a(r, k) = s * apk + c * ark;
        }
        for (int k = 0; k < d; ++k) {
          const double qkp = q(k, p);
          const double qkr = q(k, r);
          q(k, p) = c * qkp - s * qkr;
          q(k, r) = s * qkp + c * qkr;
        }
      }
    }
  }

  std::array<int, kMaxDim> order{};
  std::iota(order.begin(), order.begin() + d, 0);
  std::sort(order.begin(), order.begin() + d, [&](int i, int j) { return a(i, i) > a(j, j); });

  EigenDecomposition out{Vec(d), Matrix(d)};
  for (int k = 0; k < d; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int i = 0; i < d; ++i) out.vectors(i, k) = q(i, order[k]);
  }
  return out;
}

bool is_spd(const EigenDecomposition& eig) {
  const int d = eig.values.dim();
  if (d == 0) return true;
  const double top = eig.values[0];
  const double bottom = eig.values[d - 1];
  return top > 0.0 && bottom > kSpdRelativeThreshold * top;
}

namespace {

EigenDecomposition spd_eigen(const SymMatrix& m, const char* what) {
  EigenDecomposition eig = sym_eigen(m);
  if (!is_spd(eig)) throw SingularMatrix(std::string(what) + ": matrix is not SPD");
  return eig;
}

// Q diag(g(lambda)) Q^T
template <class Fn>
SymMatrix spectral_map(const EigenDecomposition& eig, Fn g) {
  const int d = eig.values.dim();
  Matrix out(d);
  for (int k = 0; k < d; ++k) {
    const double gk = g(eig.values[k]);
    const Vec qk = eig.vectors.column(k);
    out.add_outer(qk, qk, gk);
  }
  return SymMatrix(out);
}

}  // namespace

SymMatrix spd_inverse(const SymMatrix& m) {
  return spectral_map(spd_eigen(m, "spd_inverse"), [](double l) { return 1.0 / l; });
}

SymMatrix spd_inv_sqrt(const SymMatrix& m) {
  return spectral_map(spd_eigen(m, "spd_inv_sqrt"), [](double l) { return 1.0 / std::sqrt(l); });
}

double log_det(const SymMatrix& m) {
  const EigenDecomposition eig = spd_eigen(m, "log_det");
  double s = 0.0;
  for (int k = 0; k < eig.values.dim(); ++k) s += std::log(eig.values[k]);
  return s;
}

SymMatrix rank_one_inverse_update(const SymMatrix& v, const Vec& z) {
  if (!v.all_finite() || !z.all_finite()) {
    throw InvalidInput("rank_one_inverse_update: non-finite input");
  }
  const Vec vz = v * z;
  const double denom = 1.0 + z.dot(vz);
  SymMatrix out = v;
  out.add_outer(vz, -1.0 / denom);
  return out;
}

double min_eigenvalue(const SymMatrix& m) {
  const EigenDecomposition eig = sym_eigen(m);
  return eig.values[eig.values.dim() - 1];
}

double op_norm(const SymMatrix& m) {
  if (m.dim() == 0) return 0.0;
  const EigenDecomposition eig = sym_eigen(m);
  return std::max(std::abs(eig.values[0]), std::abs(eig.values[m.dim() - 1]));
}

SymMatrix gram(const Matrix& m) {
  const int d = m.dim();
  SymMatrix g(d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += m(k, i) * m(k, j);
      g.set(i, j, s);
    }
  return g;
}

double min_singular_value(const Matrix& m) {
  return std::sqrt(std::max(0.0, min_eigenvalue(gram(m))));
}

namespace {

struct Lu {
  Matrix lu;
  std::array<int, kMaxDim> perm{};
  int sign = 1;
  bool singular = false;
};

Lu lu_decompose(const Matrix& m) {
  const int d = m.dim();
  Lu f{m};
  std::iota(f.perm.begin(), f.perm.begin() + d, 0);
  for (int k = 0; k < d; ++k) {
    int piv = k;
    for (int i = k + 1; i < d; ++i)
      if (std::abs(f.lu(i, k)) > std::abs(f.lu(piv, k))) piv = i;
    if (f.lu(piv, k) == 0.0) {
      f.singular = true;
      return f;
    }
    if (piv != k) {
      for (int j = 0; j < d; ++j) std::swap(f.lu(k, j), f.lu(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (int i = k + 1; i < d; ++i) {
      const double l = f.lu(i, k) / f.lu(k, k);
      f.lu(i, k) = l;
      for (int j = k + 1; j < d; ++j) f.lu(i, j) -= l * f.lu(k, j);
    }
  }
  return f;
}

}  // namespace

double determinant(const Matrix& m) {
  const Lu f = lu_decompose(m);
  if (f.singular) return 0.0;
  double det = f.sign;
  for (int i = 0; i < m.dim(); ++i) det *= f.lu(i, i);
  return det;
}

Vec solve(const Matrix& m, const Vec& b) {
  check_same(m.dim(), b.dim());
  if (!m.all_finite() || !b.all_finite()) throw InvalidInput("solve: non-finite input");
  const int d = m.dim();
  const Lu f = lu_decompose(m);
  if (f.singular) throw SingularMatrix("solve: singular matrix");
  Vec x(d);
  for (int i = 0; i < d; ++i) {
    double s = b[f.perm[i]];
    for (int j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s;
  }
  for (int i = d - 1; i >= 0; --i) {
    double s = x[i];
    for (int j = i + 1; j < d; ++j) s -= f.lu(i, j) * x[j];
    x[i] = s / f.lu(i, i);
  }
  return x;
}

}  // namespace alee
