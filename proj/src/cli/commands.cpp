#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "alee/cli.hpp"
#include "alee/intervals.hpp"

namespace alee::cli {

namespace fs = std::filesystem;

namespace {

RunManifest load(const CommonOptions& opts) {
  if (opts.config.empty()) throw ConfigError("--config is required");
  RunManifest m = manifest_from_config(load_config_file(opts.config));
  if (opts.seed) m.experiment.base_seed = *opts.seed;
  if (opts.threads) {
    if (*opts.threads < 0) throw ConfigError("--threads must be >= 0");
    m.experiment.threads = *opts.threads;
  }
  return m;
}

void write_file(const fs::path& path, const std::string& contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_manifest(const CommonOptions& opts, const RunManifest& m, std::ostream& log) {
  const fs::path path = fs::path(opts.out) / "manifest.cfg";
  write_file(path, serialize_manifest(m));
  log << "wrote " << path.string() << "\n";
}

}  // namespace

void cmd_simulate(const CommonOptions& opts, std::ostream& log) {
  const RunManifest m = load(opts);
  const ExperimentConfig& exp = m.experiment;
  RngStream rng(exp.base_seed, static_cast<std::uint64_t>(m.replication));
  const Trajectory traj = simulate(exp.env, rng);
  const Offset offset = resolve_offset(exp.env);
  const WeightFamily family(exp.beta);
  const AleeFit fit = [&] {
    // Weights alone are wanted here, so a singular final system is not an error.
    try {
      return std::holds_alternative<double>(offset)
                 ? alee_fit_scalar(traj, std::get<double>(offset), family)
                 : alee_fit_contextual(traj, std::get<SymMatrix>(offset));
    } catch (const DegenerateDesign&) {
      AleeFit partial;
      if (std::holds_alternative<double>(offset)) {
        std::vector<ScalarWeightState> states(traj.dim(),
                                              ScalarWeightState(std::get<double>(offset), family));
        for (long t = 0; t < traj.size(); ++t) {
          Vec w(traj.dim());
          for (int k = 0; k < traj.dim(); ++k) w[k] = states[k].step(traj.x(t)[k], traj.y(t));
          partial.weights.push_back(w);
        }
      } else {
        ContextualWeightState state(std::get<SymMatrix>(offset));
        for (long t = 0; t < traj.size(); ++t) partial.weights.push_back(state.step(traj.x(t), traj.y(t)));
      }
      return partial;
    }
  }();
  const fs::path path = fs::path(opts.out) / m.trajectory_file;
  write_file(path, trajectory_csv(traj, fit.weights));
  log << "wrote " << path.string() << " (" << traj.size() << " rows)\n";
  write_manifest(opts, m, log);
}

void cmd_coverage(const CommonOptions& opts, std::ostream& log) {
  RunManifest m = load(opts);
  m.experiment = resolve_wdec_lambda(m.experiment);
  const auto records = run_replications(m.experiment);
  const auto summary = summarize(std::span<const ReplicationRecord>(records));
  const fs::path summary_path = fs::path(opts.out) / m.summary_file;
  const fs::path records_path = fs::path(opts.out) / m.records_file;
  write_file(summary_path, summary_csv(summary));
  write_file(records_path, records_csv(records, m.experiment.env.dim()));
  log << "wrote " << summary_path.string() << " (" << summary.size() << " rows)\n";
  log << "wrote " << records_path.string() << " (" << records.size() << " replications)\n";
  write_manifest(opts, m, log);
}

void cmd_pilot(const CommonOptions& opts, std::ostream& log) {
  RunManifest m = load(opts);
  const ExperimentConfig& exp = m.experiment;
  const double lambda = wdec_lambda_pilot(exp.env, exp.pilot_size, exp.base_seed);
  m.experiment.wdec_lambda = lambda;
  log << "lambda = " << format_double(lambda) << "\n";
  write_manifest(opts, m, log);
}

void cmd_plot(const PlotOptions& opts, std::ostream& log) {
  if (opts.records.empty()) throw ConfigError("--records is required");
  if (opts.kind != "hist" && opts.kind != "coverage_curve") {
    throw ConfigError("--kind must be 'hist' or 'coverage_curve'");
  }
  const CsvTable table = parse_csv(read_file(opts.records));
  if (table.rows.empty()) throw DataError("records file '" + opts.records + "' has no rows");

  std::string svg;
  if (opts.kind == "hist") {
    const auto c_rep = table.column("rep");
    const auto c_method = table.column("method");
    const auto c_err = table.column("standardized_error");
    const auto c_deg = table.column("degenerate");
    std::vector<HistogramPanel> panels;
    std::set<std::pair<std::string, std::string>> seen;  // one value per (rep, method)
    for (const auto& r : table.rows) {
      if (!seen.insert({r[c_rep], r[c_method]}).second) continue;
      if (r[c_deg] == "1") continue;
      const double v = parse_double(r[c_err]);
      if (!std::isfinite(v)) continue;
      auto it = std::find_if(panels.begin(), panels.end(),
                             [&](const HistogramPanel& p) { return p.title == r[c_method]; });
      if (it == panels.end()) {
        panels.push_back({r[c_method], {}});
        it = panels.end() - 1;
      }
      it->values.push_back(v);
    }
    if (panels.empty()) throw DataError("records hold no finite standardized errors (region-target runs record none)");
    svg = svg_histogram(panels);
  } else {
    std::vector<OutcomeRow> rows = outcome_rows_from_records(table);
    std::string x_label = "nominal level";
    bool diagonal = true;
    if (opts.x == "n") {
      const auto c_n = table.column("n");
      const double level = opts.level ? *opts.level : rows.front().level;
      std::vector<OutcomeRow> by_n;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].level != level) continue;
        OutcomeRow row = rows[i];
        row.level = parse_double(table.rows[i][c_n]);  // group by n instead of level
        by_n.push_back(row);
      }
      if (by_n.empty()) throw DataError("records hold no rows at level " + format_double(level));
      rows = std::move(by_n);
      x_label = "n (level " + format_double(level) + ")";
      diagonal = false;
    } else if (opts.x != "level") {
      throw ConfigError("--x must be 'level' or 'n'");
    }
    const auto summary = summarize(std::span<const OutcomeRow>(rows));
    std::vector<CurveSeries> series;
    for (const auto& row : summary) {
      const std::string label(method_name(row.method));
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const CurveSeries& s) { return s.label == label; });
      if (it == series.end()) {
        series.push_back({label, {}});
        it = series.end() - 1;
      }
      it->points.push_back({row.level, row.coverage, row.coverage_se});
    }
    for (auto& s : series) {
      std::sort(s.points.begin(), s.points.end(),
                [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
    }
    svg = svg_coverage_curve(series, x_label, diagonal);
  }
  const fs::path path =
      opts.output.empty() ? fs::path(opts.out) / (opts.kind + ".svg") : fs::path(opts.output);
  write_file(path, svg);
  log << "wrote " << path.string() << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive linear estimating equations: simulation and inference experiments"};
  app.require_subcommand(1);

  CommonOptions common;
  std::uint64_t seed = 0;
  int threads = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "Experiment config file")->required();
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the base seed");
    sub->add_option("--threads", threads, "Worker threads (0: all cores)")
        ->check(CLI::NonNegativeNumber);
  };
  CLI::App* simulate_cmd = app.add_subcommand("simulate", "Write one trajectory with its ALEE weights");
  CLI::App* coverage_cmd = app.add_subcommand("coverage", "Run replications and summarize coverage");
  CLI::App* pilot_cmd = app.add_subcommand("pilot", "Choose the W-decorrelation lambda by pilot runs");
  for (CLI::App* sub : {simulate_cmd, coverage_cmd, pilot_cmd}) add_common(sub);

  PlotOptions plot;
  double plot_level = 0.0;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Render a records CSV as SVG");
  plot_cmd->add_option("--records", plot.records, "Records CSV")->required();
  plot_cmd->add_option("--kind", plot.kind, "hist or coverage_curve")
      ->required()
      ->check(CLI::IsMember({"hist", "coverage_curve"}));
  plot_cmd->add_option("--x", plot.x, "coverage_curve x axis: level or n")
      ->check(CLI::IsMember({"level", "n"}));
  plot_cmd->add_option("--level", plot_level, "Level plotted against n");
  plot_cmd->add_option("--output", plot.output, "SVG path (default: OUT/KIND.svg)");
  plot_cmd->add_option("--out", plot.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  auto* seed_opt = app.get_subcommands().front()->get_option_no_throw("--seed");
  auto* threads_opt = app.get_subcommands().front()->get_option_no_throw("--threads");
  if (seed_opt && seed_opt->count()) common.seed = seed;
  if (threads_opt && threads_opt->count()) common.threads = threads;
  if (plot_cmd->get_option("--level")->count()) plot.level = plot_level;

  try {
    if (simulate_cmd->parsed()) cmd_simulate(common, out);
    if (coverage_cmd->parsed()) cmd_coverage(common, out);
    if (pilot_cmd->parsed()) cmd_pilot(common, out);
    if (plot_cmd->parsed()) cmd_plot(plot, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace alee::cli
