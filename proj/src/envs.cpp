#include "alee/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "alee/error.hpp"

namespace alee {

std::string_view env_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::kTwoArmed: return "two_armed";
    case EnvKind::kAr1: return "ar1";
    case EnvKind::kContextual: return "contextual";
    case EnvKind::kIidFixed: return "iid_fixed";
  }
  return "unknown";
}

EnvKind parse_env(std::string_view name) {
  for (EnvKind k : {EnvKind::kTwoArmed, EnvKind::kAr1, EnvKind::kContextual, EnvKind::kIidFixed}) {
    if (env_name(k) == name) return k;
  }
  throw InvalidInput("unknown environment '" + std::string(name) + "'");
}

std::string_view s0_rule_name(S0Rule rule) {
  switch (rule) {
    case S0Rule::kDefault: return "default";
    case S0Rule::kE2LogN: return "e2_log_n";
    case S0Rule::kE2N: return "e2_n";
    case S0Rule::kE3NOverLogLogN: return "e3_n_over_loglog_n";
    case S0Rule::kLogNIdentity: return "log_n_identity";
    case S0Rule::kConstant: return "constant";
  }
  return "unknown";
}

S0Rule parse_s0_rule(std::string_view name) {
  for (S0Rule r : {S0Rule::kDefault, S0Rule::kE2LogN, S0Rule::kE2N, S0Rule::kE3NOverLogLogN,
                   S0Rule::kLogNIdentity, S0Rule::kConstant}) {
    if (s0_rule_name(r) == name) return r;
  }
  throw InvalidInput("unknown s0 rule '" + std::string(name) + "'");
}

void EnvConfig::validate() const {
  if (n < 1) throw InvalidInput("environment: n must be >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw InvalidInput("environment: noise_sd must be finite and non-negative");
  }
  if (!theta_star.all_finite() || theta_star.dim() < 1) {
    throw InvalidInput("environment: theta must be a finite, non-empty vector");
  }
  switch (kind) {
    case EnvKind::kTwoArmed:
      if (dim() < 2) throw InvalidInput("two_armed: needs at least two arms");
      break;
    case EnvKind::kAr1:
      if (dim() != 1) throw InvalidInput("ar1: theta must be a scalar");
      break;
    case EnvKind::kContextual:
      if (dim() != 2) throw InvalidInput("contextual: contexts live on the unit circle, d = 2");
      if (num_contexts < 1) throw InvalidInput("contextual: num_contexts must be >= 1");
      break;
    case EnvKind::kIidFixed:
      break;
  }
  if (s0_rule == S0Rule::kConstant && !(s0_constant > 0.0)) {
    throw InvalidInput("environment: constant s0 rule needs a positive s0 value");
  }
}

EnvConfig default_env(EnvKind kind) {
  EnvConfig cfg;
  cfg.kind = kind;
  cfg.n = 1000;
  cfg.noise_sd = 1.0;
  cfg.theta_star = kind == EnvKind::kAr1 ? Vec{1.0} : Vec{0.3, 0.3};
  return cfg;
}

double two_armed_exploration(long t) {
  const double tt = static_cast<double>(t);
  return std::min(1.0, std::sqrt(std::log(tt) / tt));
}

double contextual_exploration(long t) {
  const double tt = static_cast<double>(t);
  const double l = std::log(tt);
  return std::min(1.0, l * l / tt);
}

namespace {

// Index of the maximum of values; exact ties broken uniformly with one extra draw.
int argmax_random_tie(const std::vector<double>& values, RngStream& rng) {
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<int> ties;
  for (int i = 0; i < static_cast<int>(values.size()); ++i)
    if (values[i] == best) ties.push_back(i);
  if (ties.size() == 1) return ties.front();
  return ties[rng.uniform_int(static_cast<int>(ties.size()))];
}

}  // namespace

Trajectory run_two_armed(const EnvConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int arms = cfg.dim();
  Trajectory traj(arms);
  std::vector<double> sums(arms, 0.0);
  std::vector<long> counts(arms, 0);
  std::vector<double> means(arms, 0.0);
  for (long t = 1; t <= cfg.n; ++t) {
    int arm;
    if (t <= arms) {
      arm = static_cast<int>(t - 1);
    } else if (rng.bernoulli(two_armed_exploration(t))) {
      arm = rng.uniform_int(arms);
    } else {
      for (int k = 0; k < arms; ++k) means[k] = sums[k] / static_cast<double>(counts[k]);
      arm = argmax_random_tie(means, rng);
    }
    const double eps = cfg.noise_sd * rng.normal();
    const double y = cfg.theta_star[arm] + eps;
    sums[arm] += y;
    ++counts[arm];
    traj.push(Vec::unit(arms, arm), y, eps);
  }
  return traj;
}

Trajectory run_ar1(const EnvConfig& cfg, RngStream& rng) {
  cfg.validate();
  Trajectory traj(1);
  double y_prev = 0.0;
  for (long t = 1; t <= cfg.n; ++t) {
    const double eps = cfg.noise_sd * rng.normal();
    const double y = cfg.theta_star[0] * y_prev + eps;
    traj.push(Vec{y_prev}, y, eps);
    y_prev = y;
  }
  return traj;
}

Trajectory run_contextual(const EnvConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int m = cfg.num_contexts;
  Trajectory traj(2);
  std::vector<Vec> contexts;
  contexts.reserve(m);
  SymMatrix ridge_gram = SymMatrix::identity(2);
  Vec ridge_cross(2);
  std::vector<double> scores(m);
  for (long t = 1; t <= cfg.n; ++t) {
    Vec x;
    if (t <= m) {
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      x = Vec{std::cos(angle), std::sin(angle)};
      contexts.push_back(x);
    } else if (rng.bernoulli(contextual_exploration(t))) {
      x = contexts[rng.uniform_int(m)];
    } else {
      const Vec theta_hat = spd_inverse(ridge_gram) * ridge_cross;
      for (int i = 0; i < m; ++i) scores[i] = contexts[i].dot(theta_hat);
      x = contexts[argmax_random_tie(scores, rng)];
    }
    const double eps = cfg.noise_sd * rng.normal();
    const double y = x.dot(cfg.theta_star) + eps;
    ridge_gram.add_outer(x);
    ridge_cross += x * y;
    traj.push(x, y, eps);
  }
  return traj;
}

Trajectory run_iid_fixed(const EnvConfig& cfg, RngStream& rng) {
  cfg.validate();
  const int d = cfg.dim();
  Trajectory traj(d);
  // The design depends only on design_seed, so it is shared by every replication.
  RngStream design(cfg.design_seed, 0);
  for (long t = 1; t <= cfg.n; ++t) {
    Vec x(d);
    if (d == 1) {
      x[0] = design.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      double norm = 0.0;
      do {
        for (int i = 0; i < d; ++i) x[i] = design.normal();
        norm = x.norm();
      } while (norm == 0.0);
      x *= 1.0 / norm;
    }
    const double eps = cfg.noise_sd * rng.normal();
    traj.push(x, x.dot(cfg.theta_star) + eps, eps);
  }
  return traj;
}

Trajectory simulate(const EnvConfig& cfg, RngStream& rng) {
  switch (cfg.kind) {
    case EnvKind::kTwoArmed: return run_two_armed(cfg, rng);
    case EnvKind::kAr1: return run_ar1(cfg, rng);
    case EnvKind::kContextual: return run_contextual(cfg, rng);
    case EnvKind::kIidFixed: return run_iid_fixed(cfg, rng);
  }
  throw InvalidInput("simulate: unknown environment");
}

Offset s0_default(EnvKind kind, long n, S0Rule rule) {
  if (n < 3) throw InvalidInput("s0: horizon n must be >= 3");
  if (rule == S0Rule::kDefault) {
    switch (kind) {
      case EnvKind::kTwoArmed: rule = S0Rule::kE2LogN; break;
      case EnvKind::kAr1: rule = S0Rule::kE2N; break;
      case EnvKind::kContextual:
      case EnvKind::kIidFixed: rule = S0Rule::kLogNIdentity; break;
    }
  }
  const double nn = static_cast<double>(n);
  const double e2 = std::exp(2.0);
  switch (rule) {
    case S0Rule::kE2LogN: return e2 * std::log(nn);
    case S0Rule::kE2N: return e2 * nn;
    case S0Rule::kE3NOverLogLogN: return std::exp(3.0) * nn / std::log(std::log(nn));
    case S0Rule::kLogNIdentity: {
      // Only meaningful for matrix offsets; scalar environments get log n.
      if (uses_scalar_weights(kind)) return std::log(nn);
      return SymMatrix::identity(2, std::log(nn));
    }
    case S0Rule::kConstant:
    case S0Rule::kDefault: break;
  }
  throw InvalidInput("s0: rule needs an explicit value");
}

Offset resolve_offset(const EnvConfig& cfg) {
  cfg.validate();
  const bool scalar = uses_scalar_weights(cfg.kind);
  if (cfg.s0_rule == S0Rule::kConstant) {
    if (scalar) return cfg.s0_constant;
    return SymMatrix::identity(cfg.dim(), cfg.s0_constant);
  }
  Offset o = s0_default(cfg.kind, cfg.n, cfg.s0_rule);
  if (scalar) {
    if (!std::holds_alternative<double>(o)) throw InvalidInput("s0: rule needs a scalar offset");
    return o;
  }
  // Matrix offsets: scalar rules become multiples of the identity; dimension follows theta.
  const double scale = std::holds_alternative<double>(o) ? std::get<double>(o)
                                                         : std::get<SymMatrix>(o)(0, 0);
  return SymMatrix::identity(cfg.dim(), scale);
}

bool uses_scalar_weights(EnvKind kind) {
  return kind == EnvKind::kTwoArmed || kind == EnvKind::kAr1;
}

}  // namespace alee
