#include "alee/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "alee/error.hpp"
#include "alee/intervals.hpp"
#include "alee/rng.hpp"
#include "alee/weights.hpp"

namespace alee {

std::string_view target_name(Target t) {
  switch (t) {
    case Target::kAuto: return "auto";
    case Target::kCoordinate: return "coordinate";
    case Target::kRegion: return "region";
  }
  return "unknown";
}

Target parse_target(std::string_view name) {
  for (Target t : {Target::kAuto, Target::kCoordinate, Target::kRegion}) {
    if (target_name(t) == name) return t;
  }
  throw InvalidInput("unknown target '" + std::string(name) + "'");
}

Target ExperimentConfig::resolved_target() const {
  if (target != Target::kAuto) return target;
  return uses_scalar_weights(env.kind) ? Target::kCoordinate : Target::kRegion;
}

void ExperimentConfig::validate() const {
  env.validate();
  if (methods.empty()) throw InvalidInput("experiment: no methods requested");
  if (levels.empty()) throw InvalidInput("experiment: no levels requested");
  for (double l : levels) {
    if (!(l > 0.0 && l < 1.0)) throw InvalidInput("experiment: levels must lie in (0, 1)");
  }
  if (replications < 1) throw InvalidInput("experiment: replications must be >= 1");
  if (!(beta > 0.0)) throw InvalidInput("experiment: beta must be positive");
  if (target_coordinate < 0 || target_coordinate >= env.dim()) {
    throw InvalidInput("experiment: target coordinate out of range");
  }
  if (threads < 0) throw InvalidInput("experiment: threads must be >= 0");
  if (!std::isnan(wdec_lambda) && !(wdec_lambda > 0.0)) {
    throw InvalidInput("experiment: W-decorrelation lambda must be positive");
  }
}

const MethodRecord& ReplicationRecord::method(Method m) const {
  for (const auto& rec : methods)
    if (rec.method == m) return rec;
  throw InvalidInput("record has no entry for method " + std::string(method_name(m)));
}

namespace {

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

double region_metric(const RegionReport& region) {
  if (region.radius == 0.0) return -std::numeric_limits<double>::infinity();
  return region.log_volume();
}

void add_region_levels(MethodRecord& rec, const std::vector<RegionReport>& regions,
                       const Vec& theta_star) {
  for (const auto& region : regions) {
    LevelOutcome out;
    out.level = region.level;
    out.covered = region.contains(theta_star);
    out.metric = region_metric(region);
    rec.levels.push_back(out);
  }
}

void add_interval_level(MethodRecord& rec, const IntervalReport& ci, double level,
                        double theta_star_k) {
  LevelOutcome out;
  out.level = level;
  out.covered = ci.contains(theta_star_k);
  out.lower = ci.lower();
  out.upper = ci.upper();
  out.metric = ci.width();
  rec.levels.push_back(out);
}

// (theta_k - theta*_k) / (sigma_hat sqrt((shape^{-1})_kk)), 0 for a zero numerator.
double coordinate_standardized(const Vec& theta, const Vec& theta_star, const SymMatrix& shape,
                               int k, double sigma_hat) {
  const double num = theta[k] - theta_star[k];
  if (num == 0.0) return 0.0;
  return num / (sigma_hat * std::sqrt(spd_inverse(shape)(k, k)));
}

WeightDiagnostics diagnostics_from(const EstimateResult& est, const SymMatrix& s,
                                   std::span<const Vec> weights) {
  WeightDiagnostics diag;
  const int d = est.theta.dim();
  diag.op_dev = op_norm(SymMatrix::identity(d) - est.gram);
  diag.sum_w2 = est.gram.trace();
  if (!weights.empty()) diag.max_weight_norm = stability_diagnostics(weights).max_norm;
  try {
    diag.affinity = affinity(est.system.transpose(), est.gram, s);
  } catch (const SingularMatrix&) {
  } catch (const DegenerateDesign&) {
  }
  return diag;
}

void mark_degenerate(const ExperimentConfig& cfg, MethodRecord& rec) {
  rec.degenerate = true;
  rec.standardized_error = kNaN;
  rec.levels.clear();
  for (double l : cfg.levels) rec.levels.push_back({l, false, kNaN, kNaN, kNaN});
}

MethodRecord evaluate_method(const ExperimentConfig& cfg, Method m, const Trajectory& traj,
                             double sigma_hat, const Offset& offset) {
  const Vec& theta_star = cfg.env.theta_star;
  const int k = cfg.target_coordinate;
  const bool coordinate = cfg.resolved_target() == Target::kCoordinate;
  const SymMatrix s = traj.gram();
  MethodRecord rec;
  rec.method = m;

  switch (m) {
    case Method::kAlee: {
      const WeightFamily family(cfg.beta);
      AleeFit fit = std::holds_alternative<double>(offset)
                        ? alee_fit_scalar(traj, std::get<double>(offset), family)
                        : alee_fit_contextual(traj, std::get<SymMatrix>(offset));
      const EstimateResult& est = fit.estimate;
      rec.theta = est.theta;
      rec.diagnostics = diagnostics_from(est, s, fit.weights);
      const bool scalar = !fit.scalar_states.empty();
      if (scalar) rec.diagnostics.sum_w2 = fit.scalar_states[k].sum_w2();
      if (coordinate) {
        if (scalar) {
          const ScalarWeightState& st = fit.scalar_states[k];
          for (double l : cfg.levels) {
            add_interval_level(rec, alee_ci_scalar(est.theta[k], st.sum_wx(), st.sum_w2(),
                                                   sigma_hat, l),
                               l, theta_star[k]);
          }
          const double num = est.theta[k] - theta_star[k];
          rec.standardized_error =
              num == 0.0 ? 0.0 : num * st.sum_wx() / (sigma_hat * std::sqrt(st.sum_w2()));
        } else {
          const SymMatrix shape = gram(est.system);
          for (double l : cfg.levels) {
            add_interval_level(rec, coordinate_interval(est.theta, shape, k, sigma_hat, l, m), l,
                               theta_star[k]);
          }
          rec.standardized_error =
              coordinate_standardized(est.theta, theta_star, shape, k, sigma_hat);
        }
      } else {
        std::vector<RegionReport> regions;
        for (double l : cfg.levels) regions.push_back(alee_region(est.theta, est.system, sigma_hat, l));
        add_region_levels(rec, regions, theta_star);
      }
      break;
    }
    case Method::kOls: {
      const EstimateResult est = ols(traj);
      rec.theta = est.theta;
      if (coordinate) {
        for (double l : cfg.levels) {
          add_interval_level(rec, coordinate_interval(est.theta, s, k, sigma_hat, l, m), l,
                             theta_star[k]);
        }
        rec.standardized_error = coordinate_standardized(est.theta, theta_star, s, k, sigma_hat);
      } else {
        std::vector<RegionReport> regions;
        for (double l : cfg.levels) regions.push_back(ols_region(est.theta, s, sigma_hat, l));
        add_region_levels(rec, regions, theta_star);
      }
      break;
    }
    case Method::kRidge: {
      const EstimateResult est = ridge(traj, 1.0);
      rec.theta = est.theta;
      const SymMatrix shape = s + SymMatrix::identity(traj.dim());
      if (coordinate) {
        for (double l : cfg.levels) {
          add_interval_level(rec, coordinate_interval(est.theta, shape, k, sigma_hat, l, m), l,
                             theta_star[k]);
        }
        rec.standardized_error =
            coordinate_standardized(est.theta, theta_star, shape, k, sigma_hat);
      } else {
        std::vector<RegionReport> regions;
        for (double l : cfg.levels) {
          RegionReport r = ols_region(est.theta, shape, sigma_hat, l);
          r.method = Method::kRidge;
          regions.push_back(r);
        }
        add_region_levels(rec, regions, theta_star);
      }
      break;
    }
    case Method::kWdec: {
      const EstimateResult est = w_decorrelation(traj, cfg.wdec_lambda);
      rec.theta = est.theta;
      rec.diagnostics = diagnostics_from(est, s, {});
      if (coordinate) {
        for (double l : cfg.levels) {
          add_interval_level(rec, coordinate_interval(est.theta, est.gram, k, sigma_hat, l, m), l,
                             theta_star[k]);
        }
        rec.standardized_error =
            coordinate_standardized(est.theta, theta_star, est.gram, k, sigma_hat);
      } else {
        std::vector<RegionReport> regions;
        for (double l : cfg.levels) regions.push_back(wdec_region(est.theta, est.gram, sigma_hat, l));
        add_region_levels(rec, regions, theta_star);
      }
      break;
    }
    case Method::kConcentration: {
      if (coordinate) {
        const EstimateResult est = ols(traj);
        rec.theta = est.theta;
        const double s_inv_v = spd_inverse(s)(k, k);
        for (double l : cfg.levels) {
          add_interval_level(rec,
                             concentration_ci_scalar(est.theta[k], s_inv_v, traj.size(),
                                                     traj.dim(), sigma_hat, 1.0 - l),
                             l, theta_star[k]);
        }
      } else {
        const EstimateResult est = ridge(traj, 1.0);
        rec.theta = est.theta;
        std::vector<RegionReport> regions;
        for (double l : cfg.levels) {
          regions.push_back(concentration_region_contextual(est.theta, s, sigma_hat, 1.0 - l));
        }
        add_region_levels(rec, regions, theta_star);
      }
      break;
    }
  }
  return rec;
}

}  // namespace

ExperimentConfig resolve_wdec_lambda(const ExperimentConfig& cfg) {
  ExperimentConfig out = cfg;
  if (wants(cfg, Method::kWdec) && std::isnan(cfg.wdec_lambda)) {
    out.wdec_lambda = wdec_lambda_pilot(cfg.env, cfg.pilot_size, cfg.base_seed);
  }
  return out;
}

ReplicationRecord evaluate_trajectory(const ExperimentConfig& cfg, const Trajectory& traj,
                                      long index) {
  if (wants(cfg, Method::kWdec) && !(cfg.wdec_lambda > 0.0)) {
    throw InvalidInput("experiment: W-decorrelation lambda is not resolved");
  }
  ReplicationRecord rec;
  rec.index = index;
  rec.n = traj.size();
  bool all_degenerate = false;
  try {
    rec.sigma_hat = std::sqrt(noise_variance(traj));
  } catch (const DegenerateDesign&) {
    all_degenerate = true;
  } catch (const SingularMatrix&) {
    all_degenerate = true;
  }
  // Offsets follow the configured rule; horizons too short for the default rule
  // leave ALEE degenerate rather than aborting the batch.
  Offset offset;
  bool offset_ok = true;
  try {
    offset = resolve_offset(cfg.env);
  } catch (const InvalidInput&) {
    offset_ok = false;
  }
  for (Method m : cfg.methods) {
    MethodRecord mr;
    mr.method = m;
    if (all_degenerate || (m == Method::kAlee && !offset_ok)) {
      mark_degenerate(cfg, mr);
    } else {
      try {
        mr = evaluate_method(cfg, m, traj, rec.sigma_hat, offset);
      } catch (const DegenerateDesign&) {
        mark_degenerate(cfg, mr);
      } catch (const SingularMatrix&) {
        mark_degenerate(cfg, mr);
      }
    }
    rec.methods.push_back(std::move(mr));
  }
  return rec;
}

ReplicationRecord run_replication(const ExperimentConfig& cfg, long index) {
  RngStream rng(cfg.base_seed, static_cast<std::uint64_t>(index));
  return evaluate_trajectory(cfg, simulate(cfg.env, rng), index);
}

std::vector<ReplicationRecord> run_replications(const ExperimentConfig& input) {
  input.validate();
  const ExperimentConfig cfg = resolve_wdec_lambda(input);
  const long total = cfg.replications;
  std::vector<ReplicationRecord> out(static_cast<std::size_t>(total));
  int workers = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<long>(workers, 1, total));

  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&]() {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= total) return;
      try {
        out[static_cast<std::size_t>(r)] = run_replication(cfg, r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(total);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<OutcomeRow> flatten(std::span<const ReplicationRecord> records) {
  std::vector<OutcomeRow> rows;
  for (const auto& rec : records) {
    for (const auto& mr : rec.methods) {
      for (const auto& lo : mr.levels) {
        rows.push_back({mr.method, lo.level, lo.covered, lo.metric, mr.degenerate});
      }
    }
  }
  return rows;
}

std::vector<CoverageRow> summarize(std::span<const OutcomeRow> rows) {
  if (rows.empty()) throw InvalidInput("summarize: no records");
  struct Acc {
    Method method;
    double level;
    long count = 0;
    long covered = 0;
    long degenerate = 0;
    std::vector<double> metrics;
  };
  std::vector<Acc> accs;
  for (const auto& row : rows) {
    auto it = std::find_if(accs.begin(), accs.end(), [&](const Acc& a) {
      return a.method == row.method && a.level == row.level;
    });
    if (it == accs.end()) {
      accs.push_back({row.method, row.level, 0, 0, 0, {}});
      it = accs.end() - 1;
    }
    ++it->count;
    if (row.degenerate) {
      ++it->degenerate;
      continue;
    }
    if (row.covered) ++it->covered;
    if (!std::isnan(row.metric)) it->metrics.push_back(row.metric);
  }

  std::vector<CoverageRow> out;
  for (const auto& a : accs) {
    CoverageRow row;
    row.method = a.method;
    row.level = a.level;
    row.replications = a.count;
    row.degenerate_count = a.degenerate;
    const double r = static_cast<double>(a.count);
    row.coverage = static_cast<double>(a.covered) / r;
    if (a.count >= 2) row.coverage_se = std::sqrt(row.coverage * (1.0 - row.coverage) / r);
    const auto m = a.metrics.size();
    if (m >= 1) {
      double sum = 0.0;
      for (double v : a.metrics) sum += v;
      row.metric_mean = sum / static_cast<double>(m);
    }
    if (m >= 2) {
      double ss = 0.0;
      for (double v : a.metrics) ss += (v - row.metric_mean) * (v - row.metric_mean);
      const double sd = std::sqrt(ss / static_cast<double>(m - 1));
      row.metric_se = sd / std::sqrt(static_cast<double>(m));
    }
    out.push_back(row);
  }
  return out;
}

std::vector<CoverageRow> summarize(std::span<const ReplicationRecord> records) {
  const auto rows = flatten(records);
  return summarize(std::span<const OutcomeRow>(rows));
}

double lower_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidInput("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile: q must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
  return values[idx];
}

double wdec_lambda_pilot(const EnvConfig& env, int n_pilot, std::uint64_t base_seed) {
  if (n_pilot < 10) throw InvalidInput("pilot: needs at least 10 trajectories");
  std::vector<double> mins;
  mins.reserve(n_pilot);
  for (int i = 0; i < n_pilot; ++i) {
    RngStream rng(base_seed, kPilotStreamOffset + static_cast<std::uint64_t>(i));
    mins.push_back(min_eigenvalue(simulate(env, rng).gram()));
  }
  return lower_quantile(std::move(mins), 0.1);
}

StandardizedErrors standardized_errors(std::span<const ReplicationRecord> records,
                                       Method method) {
  StandardizedErrors out;
  for (const auto& rec : records) {
    const MethodRecord& mr = rec.method(method);
    if (mr.degenerate || !std::isfinite(mr.standardized_error)) {
      ++out.skipped;
      continue;
    }
    out.values.push_back(mr.standardized_error);
  }
  return out;
}

}  // namespace alee
