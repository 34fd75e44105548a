#include "alee/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "alee/error.hpp"

namespace alee {

WeightFamily::WeightFamily(double beta)
    : beta_(beta), scale_(beta * std::pow(std::numbers::ln2, beta)) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidInput("weight family: beta must be positive, got " + std::to_string(beta));
  }
}

double WeightFamily::operator()(double x) const {
  if (!(x >= 1.0)) throw InvalidInput("weight family: f(x) requires x >= 1");
  const double log_e2x = 2.0 + std::log(x);
  const double loglog = std::log(log_e2x);
  return std::sqrt(scale_ / (x * log_e2x * std::pow(loglog, 1.0 + beta_)));
}

double WeightFamily::tail_integral(double a) const {
  if (!(a >= 1.0)) throw InvalidInput("weight family: tail integral requires a >= 1");
  if (std::isinf(a)) return 0.0;
  const double loglog = std::log(2.0 + std::log(a));
  return std::pow(std::numbers::ln2 / loglog, beta_);
}

double weight_fn_eval(const WeightFamily& family, double x) { return family(x); }

double weight_tail_integral(const WeightFamily& family, double a) {
  return family.tail_integral(a);
}

// ---------------------------------------------------------------------------

ScalarWeightState::ScalarWeightState(double s0, WeightFamily family)
    : family_(family), s0_(s0), s_(s0), f_prev_(0.0) {
  if (!(s0 > 0.0) || !std::isfinite(s0)) {
    throw InvalidInput("scalar weights: s0 must be positive and finite");
  }
  f_prev_ = family_(1.0);
}

double ScalarWeightState::step(double x, double y) {
  ++steps_;
  if (x == 0.0) return 0.0;
  s_ += x * x;
  const double f = family_(s_ / s0_);
  const double w = f * x / std::sqrt(s0_);
  max_f_drop_ = std::max(max_f_drop_, 1.0 - f / f_prev_);
  f_prev_ = f;
  sum_w2_ += w * w;
  sum_wx_ += w * x;
  sum_wy_ += w * y;
  max_abs_w_ = std::max(max_abs_w_, std::abs(w));
  return w;
}

ScalarCltTerms ScalarWeightState::clt_terms() const {
  return {max_abs_w_ * max_abs_w_, max_f_drop_, family_.tail_integral(s_ / s0_)};
}

double scalar_weight_step(ScalarWeightState& state, double x, double y) {
  return state.step(x, y);
}

double ar_weight_step(ScalarWeightState& state, double y_prev, double y) {
  return state.step(y_prev, y);
}

// ---------------------------------------------------------------------------

ContextualWeightState::ContextualWeightState(const SymMatrix& sigma0)
    : sigma0_(sigma0),
      sigma_(sigma0),
      v_(SymMatrix::identity(sigma0.dim())),
      sum_wx_(sigma0.dim()),
      sum_wy_(sigma0.dim()),
      sum_ww_(sigma0.dim()) {
  if (!is_spd(sym_eigen(sigma0))) throw SingularMatrix("contextual weights: Sigma_0 not SPD");
}

Vec ContextualWeightState::step(const Vec& x, double y) {
  if (x.dim() != dim()) throw InvalidInput("contextual weights: dimension mismatch");
  if (!x.all_finite() || !std::isfinite(y)) throw InvalidInput("contextual weights: non-finite data");
  if (x.norm() > 1.0 + 1e-9) throw InvalidInput("contextual weights: ||x_t||_2 exceeds 1");
  ++steps_;

  const Vec z = spd_inv_sqrt(sigma_) * x;
  const Vec vz = v_ * z;
  const double denom = 1.0 + z.dot(vz);
  v_ = rank_one_inverse_update(v_, z);
  const Vec vtz = v_ * z;
  const Vec w = std::sqrt(denom) * vtz;

  sigma_.add_outer(x);
  sum_wx_.add_outer(w, x);
  sum_wy_ += w * y;
  sum_ww_.add_outer(w);
  sum_z2_ += z.squared_norm();
  max_w_norm_ = std::max(max_w_norm_, w.norm());
  max_zvz_ = std::max(max_zvz_, z.dot(vtz));
  return w;
}

PotentialBounds ContextualWeightState::potential_bounds() const {
  PotentialBounds b;
  b.middle = spd_inverse(v_).trace() - dim();
  const double base = log_det(sigma0_);
  if (base > 0.0) {
    b.defined = true;
    b.lower = log_det(sigma_) / base;
    b.upper = 2.0 * b.lower;
    b.holds = b.lower <= b.middle && b.middle <= b.upper;
  }
  return b;
}

Vec contextual_weight_step(ContextualWeightState& state, const Vec& x, double y) {
  return state.step(x, y);
}

// ---------------------------------------------------------------------------

StabilityDiagnostics stability_diagnostics(std::span<const Vec> weights) {
  if (weights.empty()) throw InvalidInput("stability diagnostics: no weights");
  const int d = weights.front().dim();
  StabilityDiagnostics out;
  SymMatrix dev = SymMatrix::identity(d);
  for (const Vec& w : weights) {
    out.max_norm = std::max(out.max_norm, w.norm());
    dev.add_outer(w, -1.0);
  }
  out.op_dev = op_norm(dev);
  return out;
}

double affinity(const Matrix& xtw, const SymMatrix& wtw, const SymMatrix& s) {
  const SymMatrix wtw_inv = spd_inverse(wtw);
  const SymMatrix s_isqrt = spd_inv_sqrt(s);
  // X^T P_w X = XtW (WtW)^{-1} XtW^T
  const Matrix proj = xtw * wtw_inv.as_matrix() * xtw.transpose();
  const SymMatrix inner(s_isqrt.as_matrix() * proj * s_isqrt.as_matrix());
  return std::sqrt(std::max(0.0, min_eigenvalue(inner)));
}

}  // namespace alee
