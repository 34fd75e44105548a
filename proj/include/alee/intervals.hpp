#pragma once

// Confidence intervals and regions for ALEE and the baseline methods.
//
// Regions have the form { theta : (c - theta)^T M (c - theta) <= r }. All
// asymptotic constructions plug sigma_hat into chi-square / normal critical
// values; no F quantiles are used.

#include <limits>

#include "alee/estimators.hpp"
#include "alee/smallmat.hpp"

namespace alee {

struct IntervalReport {
  double center = 0.0;
  double half_width = 0.0;
  double level = 0.0;
  Method method = Method::kAlee;
  // Set when sigma_hat == 0 collapses the interval to a point.
  bool zero_width = false;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  double width() const { return 2.0 * half_width; }
  // Closed interval.
  bool contains(double theta) const { return lower() <= theta && theta <= upper(); }
};

struct RegionReport {
  Vec center;
  SymMatrix shape;
  double radius = 0.0;
  double level = 0.0;
  Method method = Method::kAlee;
  // Concentration regions only: the log-determinant form of the radius, kept
  // next to the literal one (see concentration_region_contextual).
  double alt_radius = std::numeric_limits<double>::quiet_NaN();

  // Boundary points are inside.
  bool contains(const Vec& theta) const;
  double log_volume() const;
};

// Half-width z_{(1+level)/2} sigma_hat sqrt(sum_w2) / |sum_wx|.
IntervalReport alee_ci_scalar(double theta_hat, double sum_wx, double sum_w2, double sigma_hat,
                              double level);

// { theta : ||M (theta_hat - theta)||^2 <= sigma_hat^2 chi2_{d,level} }, shape M^T M. M = sum w x^T.
RegionReport alee_region(const Vec& theta_hat, const Matrix& m, double sigma_hat, double level);

// Shape S_n, radius sigma_hat^2 chi2_{d,level}.
RegionReport ols_region(const Vec& theta_hat, const SymMatrix& s_n, double sigma_hat,
                        double level);

// Shape W^T W, radius sigma_hat^2 chi2_{d,level}.
RegionReport wdec_region(const Vec& theta_w, const SymMatrix& wtw, double sigma_hat,
                         double level);

// One coordinate of a Gaussian region with precision-style shape M:
// half-width z_{(1+level)/2} sigma_hat sqrt((M^{-1})_kk). Reduces to the d = 1 region.
IntervalReport coordinate_interval(const Vec& theta_hat, const SymMatrix& shape, int k,
                                   double sigma_hat, double level, Method method);

// f_{n,delta} = 2 (1 + 1/log n) log(1/delta) + c d log(d log n).
double concentration_f(long n, int d, double delta, double c = 1.0);

// Half-width sqrt(v^T S_n^{-1} v * f_{n,delta}) scaled by sigma_hat; level is reported as 1 - delta.
IntervalReport concentration_ci_scalar(double theta_hat, double s_inv_v, long n, int d,
                                       double sigma_hat, double delta);

// |theta_hat - theta*| <= sigma_g sqrt((lambda0 + sum_w2) log((lambda0 + sum_w2) / (delta^2 lambda0))) / |sum_wx|
// with probability >= 1 - delta under sigma_g-sub-Gaussian noise.
double alee_concentration_bound(double sum_wx, double sum_w2, double sigma_g, double lambda0,
                                double delta);

// Closed-form relaxation of the bound above for lambda0 = 1, beta = 1 and 0/1 covariates:
// sigma_g sqrt(log(2/delta^2)) sqrt(2 + log(s_n/s_0)) log(2 + log(s_n/s_0)) / (sqrt(s_n) - sqrt(s_0)).
// Requires s_0 > 1 and s_n > s_0 (InvalidInput otherwise).
double alee_closed_form_bound(double s0, double s_n, double sigma_g, double delta);

// Ridge-centred region with shape I + S_n and radius (sigma_hat sqrt(det(I + S_n) / alpha^2) + 1)^2,
// exactly as written for the self-normalized baseline. The conventional
// (sigma_hat sqrt(log(det(I + S_n) / alpha^2)) + 1)^2 is stored in alt_radius.
RegionReport concentration_region_contextual(const Vec& theta_r, const SymMatrix& s_n,
                                             double sigma_hat, double alpha);

// log of the volume of the unit ball in R^d.
double unit_ball_log_volume(int d);

// (d/2) log r - (1/2) log det M + log V_d. Throws SingularMatrix for non-SPD shapes.
double region_log_volume(const RegionReport& region);

}  // namespace alee
