#pragma once

// Data-generating processes for the simulation studies.

#include <cstdint>
#include <limits>
#include <string_view>
#include <variant>

#include "alee/estimators.hpp"
#include "alee/rng.hpp"
#include "alee/smallmat.hpp"

namespace alee {

enum class EnvKind {
  kTwoArmed,    // epsilon-greedy multi-armed bandit, one-hot covariates
  kAr1,         // y_t = theta* y_{t-1} + eps_t, covariate y_{t-1}
  kContextual,  // epsilon-greedy over a fixed set of unit-circle contexts
  kIidFixed,    // non-adaptive control: fixed unit-norm design, iid noise
};

std::string_view env_name(EnvKind kind);
EnvKind parse_env(std::string_view name);

enum class S0Rule {
  kDefault,          // the per-environment rule below
  kE2LogN,           // s0 = e^2 log n            (two-armed default)
  kE2N,              // s0 = e^2 n                (AR(1) default)
  kE3NOverLogLogN,   // s0 = e^3 n / log log n    (AR(1) alternative)
  kLogNIdentity,     // Sigma_0 = log(n) I        (contextual / iid default)
  kConstant,         // s0 = c, or Sigma_0 = c I
};

std::string_view s0_rule_name(S0Rule rule);
S0Rule parse_s0_rule(std::string_view name);

struct EnvConfig {
  EnvKind kind = EnvKind::kTwoArmed;
  long n = 1000;
  Vec theta_star{0.3, 0.3};
  double noise_sd = 1.0;
  S0Rule s0_rule = S0Rule::kDefault;
  double s0_constant = std::numeric_limits<double>::quiet_NaN();
  int num_contexts = 10;
  std::uint64_t design_seed = 0;

  int dim() const { return theta_star.dim(); }
  // Throws InvalidInput on an inconsistent configuration.
  void validate() const;
};

// Settings used in the reported experiments for each environment.
EnvConfig default_env(EnvKind kind);

// sqrt(log t / t), capped at 1.
double two_armed_exploration(long t);
// log^2 t / t, capped at 1.
double contextual_exploration(long t);

Trajectory run_two_armed(const EnvConfig& cfg, RngStream& rng);
Trajectory run_ar1(const EnvConfig& cfg, RngStream& rng);
Trajectory run_contextual(const EnvConfig& cfg, RngStream& rng);
Trajectory run_iid_fixed(const EnvConfig& cfg, RngStream& rng);
Trajectory simulate(const EnvConfig& cfg, RngStream& rng);

// Scalar s0 (bandit, AR) or Sigma_0 (contextual, iid).
using Offset = std::variant<double, SymMatrix>;

// The rule's value for horizon n. Throws InvalidInput for n < 3 or kConstant.
Offset s0_default(EnvKind kind, long n, S0Rule rule = S0Rule::kDefault);
// Resolves cfg.s0_rule, including kConstant.
Offset resolve_offset(const EnvConfig& cfg);

// True when ALEE uses the scalar per-coordinate construction (bandit, AR).
bool uses_scalar_weights(EnvKind kind);

}  // namespace alee
