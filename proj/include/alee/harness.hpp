#pragma once

// Seeded replication runner and coverage summaries.

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "alee/envs.hpp"
#include "alee/estimators.hpp"
#include "alee/smallmat.hpp"

namespace alee {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Pilot trajectories draw from streams offset by this much so they never
// overlap replication streams.
inline constexpr std::uint64_t kPilotStreamOffset = std::uint64_t{1} << 62;

enum class Target {
  kAuto,        // coordinate for bandit / AR, region otherwise
  kCoordinate,  // interval for theta*_k, width reported
  kRegion,      // ellipsoid for theta*, log-volume reported
};

std::string_view target_name(Target t);
Target parse_target(std::string_view name);

struct ExperimentConfig {
  EnvConfig env;
  std::vector<Method> methods{Method::kAlee, Method::kOls, Method::kWdec, Method::kConcentration};
  std::vector<double> levels{0.9};
  long replications = 1000;
  std::uint64_t base_seed = 0;
  double beta = 1.0;
  // NaN means "choose by pilot" (see resolve_wdec_lambda).
  double wdec_lambda = kNaN;
  int pilot_size = 100;
  Target target = Target::kAuto;
  int target_coordinate = 0;
  // 0 means std::thread::hardware_concurrency().
  int threads = 0;

  Target resolved_target() const;
  // Throws InvalidInput on an inconsistent configuration.
  void validate() const;
};

struct LevelOutcome {
  double level = 0.0;
  bool covered = false;
  // Coordinate targets only.
  double lower = kNaN;
  double upper = kNaN;
  // Interval width, or region log-volume.
  double metric = kNaN;
};

struct WeightDiagnostics {
  double max_weight_norm = kNaN;
  double op_dev = kNaN;  // ||I - W^T W||_op
  double affinity = kNaN;
  double sum_w2 = kNaN;  // target coordinate for scalar weights, trace(W^T W) otherwise
};

struct MethodRecord {
  Method method = Method::kAlee;
  bool degenerate = false;
  Vec theta;
  double standardized_error = kNaN;
  std::vector<LevelOutcome> levels;
  WeightDiagnostics diagnostics;
};

struct ReplicationRecord {
  long index = 0;
  long n = 0;
  double sigma_hat = kNaN;
  std::vector<MethodRecord> methods;

  // Throws InvalidInput when the method was not requested.
  const MethodRecord& method(Method m) const;
};

// Fills wdec_lambda by running the pilot when W-decorrelation is requested and no value is set.
ExperimentConfig resolve_wdec_lambda(const ExperimentConfig& cfg);

// Evaluates every requested method on one trajectory. wdec_lambda must be resolved.
ReplicationRecord evaluate_trajectory(const ExperimentConfig& cfg, const Trajectory& traj,
                                      long index);

// Replication r simulates from RngStream(base_seed, r).
ReplicationRecord run_replication(const ExperimentConfig& cfg, long index);

// Runs cfg.replications replications on up to cfg.threads workers. The result is in
// replication order and does not depend on the thread count. Resolves wdec_lambda first.
std::vector<ReplicationRecord> run_replications(const ExperimentConfig& cfg);

// One (replication, method, level) observation; the unit of aggregation.
struct OutcomeRow {
  Method method = Method::kAlee;
  double level = 0.0;
  bool covered = false;
  double metric = kNaN;
  bool degenerate = false;
};

std::vector<OutcomeRow> flatten(std::span<const ReplicationRecord> records);

struct CoverageRow {
  Method method = Method::kAlee;
  double level = 0.0;
  double coverage = 0.0;
  double coverage_se = kNaN;  // sqrt(p (1 - p) / R); NaN when R < 2
  double metric_mean = kNaN;  // over non-degenerate entries
  double metric_se = kNaN;    // sample sd / sqrt(count); NaN when count < 2
  long replications = 0;
  long degenerate_count = 0;
};

// Rows in order of first appearance of (method, level). Degenerate entries count
// as non-covering. Throws InvalidInput on empty input.
std::vector<CoverageRow> summarize(std::span<const OutcomeRow> rows);
std::vector<CoverageRow> summarize(std::span<const ReplicationRecord> records);

// Lower-interpolation order statistic: sorted[floor(q (N - 1))]. Throws on empty input.
double lower_quantile(std::vector<double> values, double q);

// 0.1-quantile of lambda_min(S_n) over n_pilot trajectories. Throws InvalidInput for n_pilot < 10.
double wdec_lambda_pilot(const EnvConfig& env, int n_pilot, std::uint64_t base_seed);

struct StandardizedErrors {
  std::vector<double> values;
  long skipped = 0;
};

// Per-replication standardized errors of the method on the target coordinate;
// degenerate or undefined entries are skipped and counted.
StandardizedErrors standardized_errors(std::span<const ReplicationRecord> records, Method method);

}  // namespace alee
