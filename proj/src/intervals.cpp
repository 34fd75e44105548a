#include "alee/intervals.hpp"

#include <cmath>
#include <numbers>

#include "alee/error.hpp"
#include "alee/quantiles.hpp"

namespace alee {

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidInput("confidence level must lie in (0, 1)");
}

void check_sigma(double sigma_hat) {
  if (!(sigma_hat >= 0.0) || !std::isfinite(sigma_hat)) {
    throw InvalidInput("sigma_hat must be finite and non-negative");
  }
}

double two_sided_z(double level) { return normal_quantile(0.5 * (1.0 + level)); }

RegionReport gaussian_region(const Vec& center, const SymMatrix& shape, double sigma_hat,
                             double level, Method method) {
  check_level(level);
  check_sigma(sigma_hat);
  if (!is_spd(sym_eigen(shape))) throw DegenerateDesign("region shape is singular");
  RegionReport r;
  r.center = center;
  r.shape = shape;
  r.radius = sigma_hat * sigma_hat * chi2_quantile(level, center.dim());
  r.level = level;
  r.method = method;
  return r;
}

}  // namespace

bool RegionReport::contains(const Vec& theta) const {
  const Vec u = center - theta;
  return shape.quad_form(u) <= radius;
}

double RegionReport::log_volume() const { return region_log_volume(*this); }

IntervalReport alee_ci_scalar(double theta_hat, double sum_wx, double sum_w2, double sigma_hat,
                              double level) {
  check_level(level);
  check_sigma(sigma_hat);
  if (sum_wx == 0.0) throw DegenerateDesign("alee interval: sum of w x is zero");
  IntervalReport r;
  r.center = theta_hat;
  r.half_width = two_sided_z(level) * sigma_hat * std::sqrt(sum_w2) / std::abs(sum_wx);
  r.level = level;
  r.method = Method::kAlee;
  r.zero_width = sigma_hat == 0.0;
  return r;
}

RegionReport alee_region(const Vec& theta_hat, const Matrix& m, double sigma_hat, double level) {
  if (!(min_singular_value(m) > 1e-10)) throw DegenerateDesign("alee region: singular system");
  return gaussian_region(theta_hat, gram(m), sigma_hat, level, Method::kAlee);
}

RegionReport ols_region(const Vec& theta_hat, const SymMatrix& s_n, double sigma_hat,
                        double level) {
  return gaussian_region(theta_hat, s_n, sigma_hat, level, Method::kOls);
}

RegionReport wdec_region(const Vec& theta_w, const SymMatrix& wtw, double sigma_hat,
                         double level) {
  return gaussian_region(theta_w, wtw, sigma_hat, level, Method::kWdec);
}

IntervalReport coordinate_interval(const Vec& theta_hat, const SymMatrix& shape, int k,
                                   double sigma_hat, double level, Method method) {
  check_level(level);
  check_sigma(sigma_hat);
  if (!is_spd(sym_eigen(shape))) throw DegenerateDesign("interval: precision matrix is singular");
  IntervalReport r;
  r.center = theta_hat[k];
  r.half_width = two_sided_z(level) * sigma_hat * std::sqrt(spd_inverse(shape)(k, k));
  r.level = level;
  r.method = method;
  r.zero_width = sigma_hat == 0.0;
  return r;
}

double concentration_f(long n, int d, double delta, double c) {
  if (n < 2) throw InvalidInput("concentration: needs n >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("concentration: delta must lie in (0, 1)");
  const double log_n = std::log(static_cast<double>(n));
  return 2.0 * (1.0 + 1.0 / log_n) * std::log(1.0 / delta) + c * d * std::log(d * log_n);
}

IntervalReport concentration_ci_scalar(double theta_hat, double s_inv_v, long n, int d,
                                       double sigma_hat, double delta) {
  check_sigma(sigma_hat);
  IntervalReport r;
  r.center = theta_hat;
  r.half_width = sigma_hat * std::sqrt(s_inv_v * concentration_f(n, d, delta));
  r.level = 1.0 - delta;
  r.method = Method::kConcentration;
  r.zero_width = sigma_hat == 0.0;
  return r;
}

double alee_concentration_bound(double sum_wx, double sum_w2, double sigma_g, double lambda0,
                                double delta) {
  if (!(lambda0 > 0.0)) throw InvalidInput("concentration bound: lambda0 must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("concentration bound: delta in (0, 1)");
  if (sum_wx == 0.0) throw DegenerateDesign("concentration bound: sum of w x is zero");
  const double v = lambda0 + sum_w2;
  return sigma_g * std::sqrt(v * std::log(v / (delta * delta * lambda0))) / std::abs(sum_wx);
}

double alee_closed_form_bound(double s0, double s_n, double sigma_g, double delta) {
  if (!(s0 > 1.0)) throw InvalidInput("closed-form bound: requires s0 > 1");
  if (!(s_n > s0)) throw InvalidInput("closed-form bound: requires s_n > s0");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("closed-form bound: delta in (0, 1)");
  const double l = 2.0 + std::log(s_n / s0);
  return sigma_g * std::sqrt(std::log(2.0 / (delta * delta))) * std::sqrt(l) * std::log(l) /
         (std::sqrt(s_n) - std::sqrt(s0));
}

RegionReport concentration_region_contextual(const Vec& theta_r, const SymMatrix& s_n,
                                             double sigma_hat, double alpha) {
  check_sigma(sigma_hat);
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidInput("concentration region: alpha in (0, 1]");
  const int d = theta_r.dim();
  RegionReport r;
  r.center = theta_r;
  r.shape = SymMatrix::identity(d) + s_n;
  const double log_det_v = log_det(r.shape);
  const double log_ratio = log_det_v - 2.0 * std::log(alpha);  // log(det / alpha^2)
  const double literal = sigma_hat * std::exp(0.5 * log_ratio) + 1.0;
  const double conventional = sigma_hat * std::sqrt(std::max(0.0, log_ratio)) + 1.0;
  r.radius = literal * literal;
  r.alt_radius = conventional * conventional;
  r.level = 1.0 - alpha;
  r.method = Method::kConcentration;
  return r;
}

double unit_ball_log_volume(int d) {
  const double half = 0.5 * d;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double region_log_volume(const RegionReport& region) {
  const int d = region.center.dim();
  if (!(region.radius > 0.0)) throw InvalidInput("region volume: radius must be positive");
  return 0.5 * d * std::log(region.radius) - 0.5 * log_det(region.shape) +
         unit_ball_log_volume(d);
}

}  // namespace alee
