#pragma once

// Point estimators for the adaptive linear model y_t = x_t^T theta* + eps_t.

#include <limits>
#include <string_view>
#include <vector>

#include "alee/smallmat.hpp"
#include "alee/weights.hpp"

namespace alee {

enum class Method { kAlee, kOls, kRidge, kWdec, kConcentration };

std::string_view method_name(Method m);
// Accepts the names produced by method_name; throws InvalidInput otherwise.
Method parse_method(std::string_view name);

// The collected record {(x_t, y_t)}. Environments also keep the realized noise
// so tests can check error decompositions; it is NaN for externally supplied data.
class Trajectory {
 public:
  explicit Trajectory(int dim);

  void push(const Vec& x, double y, double noise = std::numeric_limits<double>::quiet_NaN());

  int dim() const { return dim_; }
  long size() const { return static_cast<long>(ys_.size()); }
  Vec x(long t) const;
  double y(long t) const { return ys_[t]; }
  double noise(long t) const { return noise_[t]; }

  // S_n = sum x x^T
  SymMatrix gram() const;
  // sum x y
  Vec cross() const;

 private:
  int dim_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> noise_;
};

struct EstimateResult {
  Method method;
  Vec theta;
  // OLS/ridge: S_n.  W-decorrelation: W^T W.  ALEE: sum w w^T.
  SymMatrix gram;
  // ALEE and W-decorrelation: sum w x^T.  OLS/ridge: S_n.
  Matrix system;
};

// theta = sum_wy / sum_wx; DegenerateDesign when sum_wx == 0.
double alee_scalar(double sum_wx, double sum_wy);

// Solves (sum w x^T) theta = sum w y. DegenerateDesign when the smallest
// singular value of the system is <= 1e-10.
Vec alee_vector(const Matrix& sum_wx, const Vec& sum_wy);

EstimateResult ols(const Trajectory& traj);
EstimateResult ridge(const Trajectory& traj, double lambda = 1.0);

// Mean squared OLS residual.
double noise_variance(const Trajectory& traj);

// theta_W = theta_LS + sum_t w_t (y_t - x_t^T theta_LS) with
// w_t = (I - sum_{i<t} w_i x_i^T) x_t / (lambda + ||x_t||^2).
EstimateResult w_decorrelation(const Trajectory& traj, double lambda);

// ALEE weights together with the estimate built from them.
struct AleeFit {
  EstimateResult estimate;
  std::vector<Vec> weights;
  // Scalar-weight constructions only: one state per coordinate.
  std::vector<ScalarWeightState> scalar_states;
};

// One scalar weight sequence per coordinate, driven by x_{t,k}. This is the
// bandit construction (x one-hot) and, with d = 1 and x_t = y_{t-1}, the AR(1) one.
AleeFit alee_fit_scalar(const Trajectory& traj, double s0, const WeightFamily& family);

// Contextual construction with the given Sigma_0.
AleeFit alee_fit_contextual(const Trajectory& traj, const SymMatrix& sigma0);

}  // namespace alee
