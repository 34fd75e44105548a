#include "alee/estimators.hpp"

#include <cmath>
#include <string>

#include "alee/error.hpp"

namespace alee {

std::string_view method_name(Method m) {
  switch (m) {
    case Method::kAlee: return "alee";
    case Method::kOls: return "ols";
    case Method::kRidge: return "ridge";
    case Method::kWdec: return "wdec";
    case Method::kConcentration: return "concentration";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kAlee, Method::kOls, Method::kRidge, Method::kWdec,
                   Method::kConcentration}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

Trajectory::Trajectory(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw InvalidInput("trajectory: bad dimension");
}

void Trajectory::push(const Vec& x, double y, double noise) {
  if (x.dim() != dim_) throw InvalidInput("trajectory: covariate dimension mismatch");
  if (!x.all_finite() || !std::isfinite(y)) throw InvalidInput("trajectory: non-finite entry");
  for (int i = 0; i < dim_; ++i) xs_.push_back(x[i]);
  ys_.push_back(y);
  noise_.push_back(noise);
}

Vec Trajectory::x(long t) const {
  Vec v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = xs_[t * dim_ + i];
  return v;
}

SymMatrix Trajectory::gram() const {
  SymMatrix s(dim_);
  for (long t = 0; t < size(); ++t) s.add_outer(x(t));
  return s;
}

Vec Trajectory::cross() const {
  Vec c(dim_);
  for (long t = 0; t < size(); ++t) c += x(t) * ys_[t];
  return c;
}

// ---------------------------------------------------------------------------

double alee_scalar(double sum_wx, double sum_wy) {
  if (sum_wx == 0.0) throw DegenerateDesign("alee: sum of w x is zero");
  return sum_wy / sum_wx;
}

Vec alee_vector(const Matrix& sum_wx, const Vec& sum_wy) {
  if (!(min_singular_value(sum_wx) > 1e-10)) {
    throw DegenerateDesign("alee: estimating-equation system is singular");
  }
  return solve(sum_wx, sum_wy);
}

EstimateResult ols(const Trajectory& traj) {
  const SymMatrix s = traj.gram();
  if (!is_spd(sym_eigen(s))) throw DegenerateDesign("ols: S_n is singular");
  return {Method::kOls, spd_inverse(s) * traj.cross(), s, s.as_matrix()};
}

EstimateResult ridge(const Trajectory& traj, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("ridge: lambda must be positive");
  const SymMatrix s = traj.gram();
  const SymMatrix reg = s + SymMatrix::identity(traj.dim(), lambda);
  return {Method::kRidge, spd_inverse(reg) * traj.cross(), s, s.as_matrix()};
}

double noise_variance(const Trajectory& traj) {
  const Vec theta = ols(traj).theta;
  double ss = 0.0;
  for (long t = 0; t < traj.size(); ++t) {
    const double r = traj.y(t) - traj.x(t).dot(theta);
    ss += r * r;
  }
  return ss / static_cast<double>(traj.size());
}

EstimateResult w_decorrelation(const Trajectory& traj, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("w-decorrelation: lambda must be positive");
  const int d = traj.dim();
  const Vec theta_ls = ols(traj).theta;

  Matrix residual_proj = Matrix::identity(d);  // I - sum_{i<t} w_i x_i^T
  Matrix sum_wx(d);
  SymMatrix wtw(d);
  Vec correction(d);
  for (long t = 0; t < traj.size(); ++t) {
    const Vec x = traj.x(t);
    const Vec w = (residual_proj * x) * (1.0 / (lambda + x.squared_norm()));
    residual_proj.add_outer(w, x, -1.0);
    sum_wx.add_outer(w, x);
    wtw.add_outer(w);
    correction += w * (traj.y(t) - x.dot(theta_ls));
  }
  return {Method::kWdec, theta_ls + correction, wtw, sum_wx};
}

// ---------------------------------------------------------------------------

namespace {

bool is_diagonal(const Matrix& m) {
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

}  // namespace

AleeFit alee_fit_scalar(const Trajectory& traj, double s0, const WeightFamily& family) {
  const int d = traj.dim();
  AleeFit fit{{Method::kAlee, Vec(d), SymMatrix(d), Matrix(d)}, {}, {}};
  fit.scalar_states.assign(d, ScalarWeightState(s0, family));
  fit.weights.reserve(traj.size());
  Vec sum_wy(d);
  for (long t = 0; t < traj.size(); ++t) {
    const Vec x = traj.x(t);
    Vec w(d);
    for (int k = 0; k < d; ++k) w[k] = fit.scalar_states[k].step(x[k], traj.y(t));
    fit.estimate.system.add_outer(w, x);
    fit.estimate.gram.add_outer(w);
    sum_wy += w * traj.y(t);
    fit.weights.push_back(w);
  }
  // Arms decouple when the design is one-hot; otherwise solve the full system.
  if (is_diagonal(fit.estimate.system)) {
    for (int k = 0; k < d; ++k) {
      fit.estimate.theta[k] =
          alee_scalar(fit.scalar_states[k].sum_wx(), fit.scalar_states[k].sum_wy());
    }
  } else {
    fit.estimate.theta = alee_vector(fit.estimate.system, sum_wy);
  }
  return fit;
}

AleeFit alee_fit_contextual(const Trajectory& traj, const SymMatrix& sigma0) {
  const int d = traj.dim();
  if (sigma0.dim() != d) throw InvalidInput("alee: Sigma_0 dimension mismatch");
  ContextualWeightState state(sigma0);
  AleeFit fit{{Method::kAlee, Vec(d), SymMatrix(d), Matrix(d)}, {}, {}};
  fit.weights.reserve(traj.size());
  for (long t = 0; t < traj.size(); ++t) fit.weights.push_back(state.step(traj.x(t), traj.y(t)));
  fit.estimate.system = state.sum_wx();
  fit.estimate.gram = state.sum_ww();
  fit.estimate.theta = alee_vector(state.sum_wx(), state.sum_wy());
  return fit;
}

}  // namespace alee
