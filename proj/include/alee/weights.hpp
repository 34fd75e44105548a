#pragma once

// Predictable ALEE weights.
//
// Scalar weights (bandit arms, AR(1)) follow
//   s_t = s_0 + sum_{i<=t} x_i^2,   w_t = f(s_t / s_0) * x_t / sqrt(s_0),
// where f is drawn from the beta family below. Contextual weights follow
//   z_t = Sigma_{t-1}^{-1/2} x_t,
//   V_t = (I + sum_{i<=t} z_i z_i^T)^{-1},
//   w_t = sqrt(1 + z_t^T V_{t-1} z_t) * V_t z_t,
// which makes sum_t w_t w_t^T = I - V_n hold exactly.

#include <span>

#include "alee/smallmat.hpp"

namespace alee {

// f(x) = sqrt( beta (log 2)^beta / ( x log(e^2 x) (log log(e^2 x))^(1+beta) ) ),  x >= 1.
//
// Positive, strictly decreasing, int_1^inf f^2 = 1 and int_1^inf f = inf.
class WeightFamily {
 public:
  explicit WeightFamily(double beta = 1.0);

  double beta() const { return beta_; }

  // Throws InvalidInput for x < 1.
  double operator()(double x) const;

  // int_a^inf f^2(x) dx = (log 2)^beta (log log(e^2 a))^(-beta). Throws InvalidInput for a < 1.
  double tail_integral(double a) const;

 private:
  double beta_;
  double scale_;  // beta (log 2)^beta
};

double weight_fn_eval(const WeightFamily& family, double x);
double weight_tail_integral(const WeightFamily& family, double a);

// The three terms whose vanishing gives the scalar CLT:
//   max_t w_t^2,  max_t (1 - f(s_t/s_0) / f(s_{t-1}/s_0)),  int_{s_n/s_0}^inf f^2.
struct ScalarCltTerms {
  double max_w2 = 0.0;
  double max_f_drop = 0.0;
  double tail = 1.0;
};

class ScalarWeightState {
 public:
  explicit ScalarWeightState(double s0, WeightFamily family = WeightFamily{});

  // Folds (x_t, y_t) in and returns w_t. s_t includes x_t^2 before f is evaluated.
  double step(double x, double y);

  const WeightFamily& family() const { return family_; }
  double s0() const { return s0_; }
  double s() const { return s_; }
  double sum_w2() const { return sum_w2_; }
  double sum_wx() const { return sum_wx_; }
  double sum_wy() const { return sum_wy_; }
  long steps() const { return steps_; }
  double max_abs_weight() const { return max_abs_w_; }

  ScalarCltTerms clt_terms() const;

 private:
  WeightFamily family_;
  double s0_;
  double s_;
  double f_prev_;
  double sum_w2_ = 0.0;
  double sum_wx_ = 0.0;
  double sum_wy_ = 0.0;
  double max_abs_w_ = 0.0;
  double max_f_drop_ = 0.0;
  long steps_ = 0;
};

// Bandit arm: x is the arm's indicator (or general scalar covariate).
double scalar_weight_step(ScalarWeightState& state, double x, double y);
// AR(1): the covariate role is played by the previous response.
double ar_weight_step(ScalarWeightState& state, double y_prev, double y);

// log det(Sigma_0 + S_n) / log det(Sigma_0) <= trace(V_n^{-1}) - d <= 2 * (same ratio).
// Only the middle equality is exact; the outer bounds are reported, never enforced.
struct PotentialBounds {
  double lower = 0.0;
  double middle = 0.0;
  double upper = 0.0;
  bool defined = false;  // false when log det(Sigma_0) <= 0
  bool holds = false;
};

class ContextualWeightState {
 public:
  // Sigma_0 must be SPD (SingularMatrix otherwise). V_0 = I.
  explicit ContextualWeightState(const SymMatrix& sigma0);

  // Requires ||x||_2 <= 1 (+1e-9 slack); throws InvalidInput otherwise.
  Vec step(const Vec& x, double y);

  int dim() const { return sigma_.dim(); }
  long steps() const { return steps_; }
  const SymMatrix& sigma0() const { return sigma0_; }
  // Sigma_t = Sigma_0 + sum x x^T
  const SymMatrix& sigma() const { return sigma_; }
  // V_t
  const SymMatrix& variability() const { return v_; }
  // sum_t w_t x_t^T (the ALEE system matrix, i.e. W^T X)
  const Matrix& sum_wx() const { return sum_wx_; }
  const Vec& sum_wy() const { return sum_wy_; }
  // sum_t w_t w_t^T
  const SymMatrix& sum_ww() const { return sum_ww_; }
  // sum_t ||z_t||^2 = sum_t x_t^T Sigma_{t-1}^{-1} x_t
  double sum_z2() const { return sum_z2_; }
  double max_weight_norm() const { return max_w_norm_; }
  // max_t z_t^T V_t z_t
  double max_zvz() const { return max_zvz_; }

  PotentialBounds potential_bounds() const;

 private:
  SymMatrix sigma0_;
  SymMatrix sigma_;
  SymMatrix v_;
  Matrix sum_wx_;
  Vec sum_wy_;
  SymMatrix sum_ww_;
  double sum_z2_ = 0.0;
  double max_w_norm_ = 0.0;
  double max_zvz_ = 0.0;
  long steps_ = 0;
};

Vec contextual_weight_step(ContextualWeightState& state, const Vec& x, double y);

struct StabilityDiagnostics {
  double max_norm = 0.0;  // max_t ||w_t||_2
  double op_dev = 0.0;    // ||I - sum w w^T||_op
};

// Throws InvalidInput on an empty sequence.
StabilityDiagnostics stability_diagnostics(std::span<const Vec> weights);

// Cosine of the largest principal angle between span(W) and span(X):
// sqrt(lambda_min(S^{-1/2} XtW (WtW)^{-1} XtW^T S^{-1/2})), computed from d x d accumulations.
// xtw = X^T W = sum_t x_t w_t^T, wtw = W^T W, s = X^T X.
double affinity(const Matrix& xtw, const SymMatrix& wtw, const SymMatrix& s);

}  // namespace alee
