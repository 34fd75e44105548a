#include <doctest.h>

#include <cmath>
#include <numbers>

#include "alee/envs.hpp"
#include "alee/error.hpp"
#include "alee/intervals.hpp"
#include "alee/quantiles.hpp"
#include "support.hpp"

using namespace alee;

TEST_CASE("alee scalar interval") {
  const auto ci = alee_ci_scalar(0.3, 10.0, 1.0, 1.0, 0.9);
  CHECK(ci.half_width == doctest::Approx(0.1644854).epsilon(1e-6));
  CHECK(ci.center == 0.3);
  CHECK(ci.width() == doctest::Approx(2 * 0.1644854).epsilon(1e-6));
  CHECK(ci.contains(ci.lower()));
  CHECK(ci.contains(ci.upper()));
  CHECK_FALSE(ci.contains(ci.upper() + 1e-12));

  const auto zero = alee_ci_scalar(0.3, 10.0, 1.0, 0.0, 0.9);
  CHECK(zero.half_width == 0.0);
  CHECK(zero.zero_width);
  CHECK(alee_ci_scalar(0.0, 3.0, 0.5, 2.0, 0.8).half_width ==
        doctest::Approx(2.0 * alee_ci_scalar(0.0, 3.0, 0.5, 1.0, 0.8).half_width));
  CHECK(alee_ci_scalar(0.0, -10.0, 1.0, 1.0, 0.9).half_width == doctest::Approx(ci.half_width));

  CHECK_THROWS_AS(alee_ci_scalar(0.0, 0.0, 1.0, 1.0, 0.9), DegenerateDesign);
  CHECK_THROWS_AS(alee_ci_scalar(0.0, 1.0, 1.0, 1.0, 1.0), InvalidInput);
  CHECK_THROWS_AS(alee_ci_scalar(0.0, 1.0, 1.0, -1.0, 0.9), InvalidInput);
}

TEST_CASE("gaussian regions") {
  SUBCASE("identity system gives a chi-square ball") {
    const auto r = alee_region(Vec{0.0, 0.0}, Matrix::identity(2), 1.0, 0.9);
    CHECK(r.radius == doctest::Approx(chi2_quantile(0.9, 2)));
    const double rad = std::sqrt(r.radius);
    CHECK(r.contains(Vec{rad, 0.0}));
    CHECK_FALSE(r.contains(Vec{rad * (1 + 1e-9), 0.0}));
  }
  SUBCASE("d = 1 matches the scalar interval") {
    const double m = 7.0, w2 = 0.6, sigma = 1.3, theta = 0.25;
    // The scalar interval standardizes by sqrt(sum w^2); the region by the system alone.
    const auto ci = alee_ci_scalar(theta, m / std::sqrt(w2), 1.0, sigma, 0.9);
    const auto reg = alee_region(Vec{theta}, Matrix(1, {m / std::sqrt(w2)}), sigma, 0.9);
    const double hw = std::sqrt(reg.radius / reg.shape(0, 0));
    CHECK(hw == doctest::Approx(ci.half_width).epsilon(1e-12));
    const auto ols_ci = coordinate_interval(Vec{theta}, SymMatrix(1, {4.0}), 0, sigma, 0.9, Method::kOls);
    const auto ols_reg = ols_region(Vec{theta}, SymMatrix(1, {4.0}), sigma, 0.9);
    CHECK(std::sqrt(ols_reg.radius / 4.0) == doctest::Approx(ols_ci.half_width).epsilon(1e-12));
  }
  SUBCASE("centre is always inside") {
    RngStream rng(31, 0);
    for (int i = 0; i < 50; ++i) {
      const Vec c = test::random_vec(rng, 3);
      const Matrix m = test::random_matrix(rng, 3);
      CHECK(alee_region(c, m, 0.7, 0.85).contains(c));
      CHECK(ols_region(c, test::random_spd(rng, 3), 0.7, 0.85).contains(c));
      CHECK(wdec_region(c, test::random_spd(rng, 3), 0.7, 0.85).contains(c));
    }
  }
  SUBCASE("shapes") {
    const Matrix m(2, {1.0, 2.0, 0.0, 3.0});
    const auto r = alee_region(Vec{0.0, 0.0}, m, 1.0, 0.9);
    CHECK(test::max_abs_diff(r.shape, gram(m)) == 0.0);
    CHECK(wdec_region(Vec{0.0, 0.0}, SymMatrix::identity(2), 1.0, 0.9).method == Method::kWdec);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(alee_region(Vec{0.0, 0.0}, Matrix(2), 1.0, 0.9), DegenerateDesign);
    CHECK_THROWS_AS(ols_region(Vec{0.0, 0.0}, SymMatrix(2), 1.0, 0.9), DegenerateDesign);
    CHECK_THROWS_AS(wdec_region(Vec{0.0, 0.0}, SymMatrix::diagonal(Vec{1.0, 0.0}), 1.0, 0.9),
                    DegenerateDesign);
  }
}

TEST_CASE("membership is the exact quadratic-form test") {
  RngStream rng(32, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec c = test::random_vec(rng, 2);
    const SymMatrix s = test::random_spd(rng, 2, 20.0);
    const auto r = ols_region(c, s, 1.0, 0.9);
    const Vec theta = c + test::random_vec(rng, 2);
    const Vec u = c - theta;
    CHECK(r.contains(theta) == (s.quad_form(u) <= r.radius));
  }
}

TEST_CASE("coverage nests across levels") {
  RngStream rng(33, 0);
  for (int i = 0; i < 200; ++i) {
    const Vec c = test::random_vec(rng, 2);
    const SymMatrix s = test::random_spd(rng, 2, 20.0);
    const Vec theta = c + test::random_vec(rng, 2) * 0.5;
    if (ols_region(c, s, 1.0, 0.9).contains(theta)) CHECK(ols_region(c, s, 1.0, 0.95).contains(theta));
  }
}

TEST_CASE("concentration interval") {
  CHECK(concentration_f(1000, 2, 0.05) == doctest::Approx(12.110).epsilon(1e-4));
  const double limit = 2.0 * std::log(2.0 * std::log(1000.0));
  CHECK(concentration_f(1000, 2, 1.0 - 1e-12) == doctest::Approx(limit).epsilon(1e-9));
  const auto a = concentration_ci_scalar(0.0, 0.01, 1000, 2, 1.0, 0.1);
  const auto b = concentration_ci_scalar(0.0, 0.04, 1000, 2, 1.0, 0.1);
  CHECK(b.half_width == doctest::Approx(2.0 * a.half_width));
  CHECK(a.level == doctest::Approx(0.9));
  CHECK(a.half_width == doctest::Approx(std::sqrt(0.01 * concentration_f(1000, 2, 0.1))));
  CHECK_THROWS_AS(concentration_f(1, 2, 0.1), InvalidInput);
}

TEST_CASE("alee concentration bound") {
  const double delta = 0.05;
  CHECK(alee_concentration_bound(1.0, 1.0, 1.0, 1.0, delta) ==
        doctest::Approx(std::sqrt(2.0 * std::log(2.0 / (delta * delta)))));
  CHECK(alee_concentration_bound(2.0, 0.3, 0.0, 1.0, delta) == 0.0);
  CHECK_THROWS_AS(alee_concentration_bound(0.0, 1.0, 1.0, 1.0, delta), DegenerateDesign);
  CHECK_THROWS_AS(alee_concentration_bound(1.0, 1.0, 1.0, 0.0, delta), InvalidInput);
  CHECK_THROWS_AS(alee_concentration_bound(1.0, 1.0, 1.0, 1.0, 1.0), InvalidInput);
}

TEST_CASE("concentration bound dominates the empirical quantile") {
  // Bandit arm 1 with Gaussian (hence 1-sub-Gaussian) noise.
  EnvConfig env = default_env(EnvKind::kTwoArmed);
  env.n = 300;
  const double s0 = std::get<double>(resolve_offset(env));
  const int reps = 10000;
  std::vector<double> ratio, bound;
  for (int r = 0; r < reps; ++r) {
    RngStream rng(34, r);
    const Trajectory traj = run_two_armed(env, rng);
    ScalarWeightState st(s0);
    double sum_we = 0.0;
    for (long t = 0; t < traj.size(); ++t) sum_we += st.step(traj.x(t)[0], traj.y(t)) * traj.noise(t);
    ratio.push_back(std::abs(sum_we) / std::abs(st.sum_wx()));
    bound.push_back(alee_concentration_bound(st.sum_wx(), st.sum_w2(), 1.0, 1.0, 0.1));
  }
  // The bound is pathwise; compare its smallest value with the empirical 0.9-quantile.
  std::vector<double> sorted = ratio;
  std::sort(sorted.begin(), sorted.end());
  const double q90 = sorted[static_cast<std::size_t>(0.9 * (reps - 1))];
  long violations = 0;
  for (int r = 0; r < reps; ++r) violations += ratio[r] > bound[r];
  CHECK(static_cast<double>(violations) / reps <= 0.1);
  double median_bound = 0.0;
  {
    std::vector<double> b = bound;
    std::sort(b.begin(), b.end());
    median_bound = b[reps / 2];
  }
  CHECK(median_bound >= q90);
}

TEST_CASE("closed-form bound") {
  CHECK_THROWS_AS(alee_closed_form_bound(1.0, 10.0, 1.0, 0.1), InvalidInput);
  CHECK_THROWS_AS(alee_closed_form_bound(5.0, 5.0, 1.0, 0.1), InvalidInput);
  const double v = alee_closed_form_bound(2.0, 100.0, 1.0, 0.1);
  const double l = 2.0 + std::log(50.0);
  CHECK(v == doctest::Approx(std::sqrt(std::log(200.0)) * std::sqrt(l) * std::log(l) /
                             (10.0 - std::sqrt(2.0))));
}

TEST_CASE("contextual concentration region") {
  const auto r = concentration_region_contextual(Vec{0.0, 0.0}, SymMatrix(2), 1.0, 1.0);
  CHECK(r.radius == doctest::Approx(4.0));
  CHECK(test::max_abs_diff(r.shape, SymMatrix::identity(2)) == 0.0);

  double prev = 0.0;
  for (double scale : {0.0, 1.0, 5.0, 50.0}) {
    const auto q = concentration_region_contextual(Vec{0.0, 0.0}, SymMatrix::identity(2, scale), 1.0, 0.1);
    CHECK(q.radius > prev);
    prev = q.radius;
  }

  RngStream rng(35, 0);
  for (int i = 0; i < 20; ++i) {
    const SymMatrix s = test::random_spd(rng, 2, 30.0) * 20.0;
    const double sigma = 0.5 + rng.uniform();
    const double alpha = 0.05 + 0.2 * rng.uniform();
    const auto q = concentration_region_contextual(Vec{0.1, 0.2}, s, sigma, alpha);
    const double det = (1 + s(0, 0)) * (1 + s(1, 1)) - s(0, 1) * s(0, 1);
    const double lit = sigma * std::sqrt(det / (alpha * alpha)) + 1.0;
    const double conv = sigma * std::sqrt(std::log(det / (alpha * alpha))) + 1.0;
    CHECK(q.radius == doctest::Approx(lit * lit).epsilon(1e-9));
    CHECK(q.alt_radius == doctest::Approx(conv * conv).epsilon(1e-9));
    CHECK(q.level == doctest::Approx(1.0 - alpha));
  }
}

TEST_CASE("log volume") {
  RegionReport disk;
  disk.center = Vec{0.0, 0.0};
  disk.shape = SymMatrix::identity(2);
  disk.radius = 1.0;
  CHECK(region_log_volume(disk) == doctest::Approx(std::log(std::numbers::pi)));
  CHECK(disk.log_volume() == doctest::Approx(1.14473).epsilon(1e-5));
  RegionReport big = disk;
  big.radius = 4.0;
  CHECK(big.log_volume() - disk.log_volume() == doctest::Approx(std::log(4.0)));
  RegionReport ellipse = disk;
  ellipse.shape = SymMatrix::diagonal(Vec{4.0, 1.0});
  CHECK(ellipse.log_volume() == doctest::Approx(std::log(std::numbers::pi / 2.0)));

  CHECK(unit_ball_log_volume(1) == doctest::Approx(std::log(2.0)));
  CHECK(unit_ball_log_volume(3) == doctest::Approx(std::log(4.0 / 3.0 * std::numbers::pi)));

  RegionReport bad = disk;
  bad.shape = SymMatrix::diagonal(Vec{1.0, 0.0});
  CHECK_THROWS_AS(bad.log_volume(), SingularMatrix);

  // Shape domination shrinks volume.
  RngStream rng(36, 0);
  for (int i = 0; i < 50; ++i) {
    RegionReport a = disk, b = disk;
    b.shape = test::random_spd(rng, 2, 10.0);
    a.shape = b.shape + test::random_spd(rng, 2, 10.0) * 0.1;
    CHECK(a.log_volume() <= b.log_volume());
  }
}

TEST_CASE("coordinate intervals on a fixed design") {
  EnvConfig env = default_env(EnvKind::kIidFixed);
  env.n = 100;
  env.theta_star = Vec{0.5, -0.25};
  const int reps = 2000;
  for (double level : {0.8, 0.9}) {
    long covered_ols = 0, covered_alee = 0;
    for (int r = 0; r < reps; ++r) {
      RngStream rng(37, r);
      const Trajectory traj = run_iid_fixed(env, rng);
      const double sigma = std::sqrt(noise_variance(traj));
      const EstimateResult est = ols(traj);
      covered_ols += coordinate_interval(est.theta, est.gram, 0, sigma, level, Method::kOls)
                         .contains(env.theta_star[0]);
      const AleeFit fit = alee_fit_contextual(traj, SymMatrix::identity(2, std::log(100.0)));
      covered_alee += coordinate_interval(fit.estimate.theta, gram(fit.estimate.system), 0, sigma,
                                          level, Method::kAlee)
                          .contains(env.theta_star[0]);
    }
    const double se = std::sqrt(level * (1 - level) / reps);
    CAPTURE(level);
    CHECK(std::abs(static_cast<double>(covered_ols) / reps - level) <= 3 * se);
    // The ALEE normalization ignores the leftover V_n term, so it can only err on the wide side.
    CHECK(static_cast<double>(covered_alee) / reps >= level - 3 * se);
  }
}
