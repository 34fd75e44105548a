#pragma once

// Command-line front end: config files, CSV tables, SVG figures.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "alee/error.hpp"
#include "alee/harness.hpp"

namespace alee::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Bad config file or command line; exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Missing or malformed input data; exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// ---- config -------------------------------------------------------------

struct ConfigEntry {
  std::string value;
  int line = 0;
};

struct ConfigSection {
  int line = 0;
  std::map<std::string, ConfigEntry> entries;
};

// `[section]` headers, `key = value` lines, `#` or `;` comments.
struct ConfigFile {
  std::string source;  // used as the prefix of error messages
  std::map<std::string, ConfigSection> sections;
};

// Throws ConfigError "source:line: message" on syntax errors.
ConfigFile parse_config_text(std::string_view text, std::string source = "config");
ConfigFile load_config_file(const std::string& path);

struct RunManifest {
  ExperimentConfig experiment;
  // Replication whose trajectory `simulate` writes.
  long replication = 0;
  std::string trajectory_file = "trajectory.csv";
  std::string summary_file = "summary.csv";
  std::string records_file = "records.csv";
};

// Throws ConfigError naming the offending line for unknown keys or bad values.
RunManifest manifest_from_config(const ConfigFile& file);
// Fully resolved form: re-parsing it gives the same manifest.
std::string serialize_manifest(const RunManifest& manifest);

// The concrete rule behind S0Rule::kDefault.
S0Rule concrete_s0_rule(EnvKind kind, S0Rule rule);

// ---- csv ----------------------------------------------------------------

// 17 significant digits, "nan" / "inf" / "-inf" sentinels.
std::string format_double(double v);
// Throws DataError on malformed numbers.
double parse_double(std::string_view s);

std::string trajectory_csv(const Trajectory& traj, const std::vector<Vec>& weights);
std::string summary_csv(const std::vector<CoverageRow>& rows);
std::string records_csv(const std::vector<ReplicationRecord>& records, int dim);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Throws DataError naming the column when it is absent.
  std::size_t column(std::string_view name) const;
};

// Throws DataError on ragged rows or a missing header.
CsvTable parse_csv(std::string_view text);

// Outcome rows as stored in a records CSV; the inverse of records_csv for summarize().
std::vector<OutcomeRow> outcome_rows_from_records(const CsvTable& table);

// ---- svg ----------------------------------------------------------------

struct HistogramPanel {
  std::string title;
  std::vector<double> values;
};

// One standardized-error histogram per panel, each with the N(0, 1) density overlaid.
std::string svg_histogram(const std::vector<HistogramPanel>& panels, int bins = 40);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
  double se = 0.0;  // error bar half-length; NaN draws none
};

struct CurveSeries {
  std::string label;
  std::vector<CurvePoint> points;
};

// Coverage against x with +- SE error bars; draws the y = x reference when diagonal is set.
std::string svg_coverage_curve(const std::vector<CurveSeries>& series, const std::string& x_label,
                               bool diagonal);

// ---- commands -----------------------------------------------------------

struct CommonOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct PlotOptions {
  std::string records;
  std::string kind;    // hist | coverage_curve
  std::string x = "level";  // coverage_curve: level | n
  std::string output;  // default: <out>/<kind>.svg
  std::string out = "out";
  std::optional<double> level;  // coverage_curve vs n: level to plot (default: first)
};

// Each command writes its outputs and out/manifest.cfg. They throw ConfigError,
// DataError or InvalidInput; run() maps those to exit codes.
void cmd_simulate(const CommonOptions& opts, std::ostream& log);
void cmd_coverage(const CommonOptions& opts, std::ostream& log);
void cmd_pilot(const CommonOptions& opts, std::ostream& log);
void cmd_plot(const PlotOptions& opts, std::ostream& log);

// Full argument parsing and dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace alee::cli
