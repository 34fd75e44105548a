#pragma once

// Small dense linear algebra for dimensions up to kMaxDim.
//
// Everything is a fixed-capacity value type: no heap allocation, cheap to
// copy, safe to hand between threads. Symmetric matrices are symmetrized on
// construction and every mutating operation writes both triangles.

#include <array>
#include <initializer_list>
#include <span>

namespace alee {

inline constexpr int kMaxDim = 8;

class Vec {
 public:
  Vec() = default;
  explicit Vec(int dim);
  Vec(std::initializer_list<double> values);

  static Vec unit(int dim, int k);

  int dim() const { return dim_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }
  std::span<const double> values() const { return {v_.data(), static_cast<std::size_t>(dim_)}; }

  double dot(const Vec& other) const;
  double squared_norm() const { return dot(*this); }
  double norm() const;
  double max_abs() const;
  bool all_finite() const;

  Vec& operator+=(const Vec& other);
  Vec& operator-=(const Vec& other);
  Vec& operator*=(double s);

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> v_{};
};

// General square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(int dim);
  Matrix(int dim, std::initializer_list<double> row_major);

  static Matrix identity(int dim);

  int dim() const { return dim_; }
  double operator()(int i, int j) const { return a_[i * kMaxDim + j]; }
  double& operator()(int i, int j) { return a_[i * kMaxDim + j]; }

  Matrix transpose() const;
  Vec column(int j) const;
  double max_abs() const;
  bool all_finite() const;

  // this += scale * a b^T
  Matrix& add_outer(const Vec& a, const Vec& b, double scale = 1.0);

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, double s) { return a *= s; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Vec operator*(const Matrix& a, const Vec& x);

 private:
  int dim_ = 0;
  std::array<double, kMaxDim * kMaxDim> a_{};
};

class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(int dim);
  // Entries are symmetrized: stored value is (m_ij + m_ji) / 2.
  SymMatrix(int dim, std::initializer_list<double> row_major);
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(int dim, double scale = 1.0);
  static SymMatrix diagonal(const Vec& diag);

  int dim() const { return m_.dim(); }
  double operator()(int i, int j) const { return m_(i, j); }
  // Writes (i, j) and (j, i).
  void set(int i, int j, double value);

  // this += scale * x x^T
  SymMatrix& add_outer(const Vec& x, double scale = 1.0);

  double quad_form(const Vec& x) const;
  double trace() const;
  double max_abs() const { return m_.max_abs(); }
  bool all_finite() const { return m_.all_finite(); }
  const Matrix& as_matrix() const { return m_; }

  SymMatrix& operator+=(const SymMatrix& other);
  SymMatrix& operator-=(const SymMatrix& other);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend Vec operator*(const SymMatrix& a, const Vec& x) { return a.m_ * x; }

 private:
  Matrix m_;
};

// Eigen-decomposition M = Q diag(values) Q^T; values descending, eigenvectors in the columns of Q.
struct EigenDecomposition {
  Vec values;
  Matrix vectors;
};

// Cyclic Jacobi. Throws InvalidInput on non-finite entries.
EigenDecomposition sym_eigen(const SymMatrix& m);

// SPD means min eigenvalue > 1e-12 * max eigenvalue (and max eigenvalue > 0).
inline constexpr double kSpdRelativeThreshold = 1e-12;
bool is_spd(const EigenDecomposition& eig);

// These three throw SingularMatrix unless M is SPD.
SymMatrix spd_inverse(const SymMatrix& m);
SymMatrix spd_inv_sqrt(const SymMatrix& m);
double log_det(const SymMatrix& m);

// (V^{-1} + z z^T)^{-1} by Sherman-Morrison: V - V z z^T V / (1 + z^T V z).
SymMatrix rank_one_inverse_update(const SymMatrix& v, const Vec& z);

double min_eigenvalue(const SymMatrix& m);
// Largest |eigenvalue|.
double op_norm(const SymMatrix& m);

// M^T M
SymMatrix gram(const Matrix& m);
double min_singular_value(const Matrix& m);
double determinant(const Matrix& m);

// Solves M x = b with partially pivoted LU. Throws SingularMatrix on a zero pivot.
Vec solve(const Matrix& m, const Vec& b);

}  // namespace alee
