#pragma once

#include <cmath>

#include "alee/rng.hpp"
#include "alee/smallmat.hpp"

namespace alee::test {

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

inline double max_abs_diff(const SymMatrix& a, const SymMatrix& b) {
  return max_abs_diff(a.as_matrix(), b.as_matrix());
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Vec random_vec(RngStream& rng, int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal();
  return v;
}

inline Vec random_unit_ball(RngStream& rng, int d) {
  Vec v = random_vec(rng, d);
  const double r = std::pow(rng.uniform(), 1.0 / d);
  return v * (r / v.norm());
}

inline Matrix random_matrix(RngStream& rng, int d) {
  Matrix m(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}

// Q diag(eig) Q^T with eigenvalues spread log-uniformly over [1, cond].
inline SymMatrix random_spd(RngStream& rng, int d, double cond = 100.0) {
  Matrix q = random_matrix(rng, d);
  // Gram-Schmidt on the columns.
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < j; ++k) {
      double dot = 0.0;
      for (int i = 0; i < d; ++i) dot += q(i, j) * q(i, k);
      for (int i = 0; i < d; ++i) q(i, j) -= dot * q(i, k);
    }
    double norm = 0.0;
    for (int i = 0; i < d; ++i) norm += q(i, j) * q(i, j);
    norm = std::sqrt(norm);
    for (int i = 0; i < d; ++i) q(i, j) /= norm;
  }
  SymMatrix m(d);
  for (int k = 0; k < d; ++k) {
    const double lambda = std::exp(std::log(cond) * rng.uniform());
    m.add_outer(q.column(k), lambda);
  }
  return m;
}

}  // namespace alee::test
