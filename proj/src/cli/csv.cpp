#include <charconv>
#include <cmath>
#include <sstream>

#include "alee/cli.hpp"

namespace alee::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
    throw DataError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

std::string trajectory_csv(const Trajectory& traj, const std::vector<Vec>& weights) {
  if (weights.size() != static_cast<std::size_t>(traj.size())) {
    throw InvalidInput("trajectory_csv: one weight per round required");
  }
  const int d = traj.dim();
  std::ostringstream os;
  os << "t";
  for (int i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",y";
  for (int i = 1; i <= d; ++i) os << ",w_" << i;
  os << "\n";
  for (long t = 0; t < traj.size(); ++t) {
    os << t + 1;
    const Vec x = traj.x(t);
    for (int i = 0; i < d; ++i) os << ',' << format_double(x[i]);
    os << ',' << format_double(traj.y(t));
    for (int i = 0; i < d; ++i) os << ',' << format_double(weights[t][i]);
    os << "\n";
  }
  return os.str();
}

std::string summary_csv(const std::vector<CoverageRow>& rows) {
  std::ostringstream os;
  os << "method,level,coverage,coverage_se,width_or_logvol,width_se,R,degenerate_count\n";
  for (const auto& r : rows) {
    os << method_name(r.method) << ',' << format_double(r.level) << ','
       << format_double(r.coverage) << ',' << format_double(r.coverage_se) << ','
       << format_double(r.metric_mean) << ',' << format_double(r.metric_se) << ','
       << r.replications << ',' << r.degenerate_count << "\n";
  }
  return os.str();
}

std::string records_csv(const std::vector<ReplicationRecord>& records, int dim) {
  std::ostringstream os;
  os << "rep,n,method,level";
  for (int i = 1; i <= dim; ++i) os << ",theta_" << i;
  os << ",lower,upper,covered,width_or_logvol,standardized_error,degenerate,sigma_hat,"
        "max_weight_norm,op_dev,affinity,sum_w2\n";
  for (const auto& rec : records) {
    for (const auto& mr : rec.methods) {
      for (const auto& lo : mr.levels) {
        os << rec.index << ',' << rec.n << ',' << method_name(mr.method) << ','
           << format_double(lo.level);
        for (int i = 0; i < dim; ++i) {
          os << ',' << format_double(i < mr.theta.dim() ? mr.theta[i] : kNaN);
        }
        const auto& dg = mr.diagnostics;
        os << ',' << format_double(lo.lower) << ',' << format_double(lo.upper) << ','
           << (lo.covered ? 1 : 0) << ',' << format_double(lo.metric) << ','
           << format_double(mr.standardized_error) << ',' << (mr.degenerate ? 1 : 0) << ','
           << format_double(rec.sigma_hat) << ',' << format_double(dg.max_weight_norm) << ','
           << format_double(dg.op_dev) << ',' << format_double(dg.affinity) << ','
           << format_double(dg.sum_w2) << "\n";
      }
    }
  }
  return os.str();
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw DataError("records are missing column '" + std::string(name) + "'");
}

namespace {

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(start));
      return cells;
    }
    cells.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

bool parse_flag(const std::string& cell) {
  if (cell == "1") return true;
  if (cell == "0") return false;
  throw DataError("expected 0 or 1, got '" + cell + "'");
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  std::size_t pos = 0;
  bool first = true;
  long line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  if (first) throw DataError("csv has no header");
  return table;
}

std::vector<OutcomeRow> outcome_rows_from_records(const CsvTable& table) {
  const auto c_method = table.column("method");
  const auto c_level = table.column("level");
  const auto c_covered = table.column("covered");
  const auto c_metric = table.column("width_or_logvol");
  const auto c_degenerate = table.column("degenerate");
  std::vector<OutcomeRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    OutcomeRow row;
    try {
      row.method = parse_method(r[c_method]);
    } catch (const InvalidInput& e) {
      throw DataError(e.what());
    }
    row.level = parse_double(r[c_level]);
    row.covered = parse_flag(r[c_covered]);
    row.metric = parse_double(r[c_metric]);
    row.degenerate = parse_flag(r[c_degenerate]);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace alee::cli
