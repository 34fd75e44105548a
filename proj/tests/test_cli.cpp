#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "alee/cli.hpp"
#include "alee/error.hpp"

using namespace alee;
using namespace alee::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("alee_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void write(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string config_error(const std::string& text) {
  try {
    manifest_from_config(parse_config_text(text, "t.cfg"));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

int run_args(std::vector<std::string> args, std::string* out_text = nullptr) {
  args.insert(args.begin(), "alee");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

bool well_formed_xml(const std::string& text) {
  try {
    std::istringstream in(text);
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(in, tree);
    return tree.count("svg") == 1;
  } catch (const std::exception&) {
    return false;
  }
}

const char* kContextualCfg = R"(
[experiment]
env = contextual
methods = alee, ols, wdec, concentration
levels = 0.8, 0.85, 0.9
replications = 12
seed = 5

[contextual]
n = 150

[wdec]
lambda = 10
)";

}  // namespace

TEST_CASE("config syntax") {
  const ConfigFile f = parse_config_text("# top\n[experiment]\nenv = ar1  ; trailing\n\n[ar1]\nn=50\n");
  CHECK(f.sections.at("experiment").entries.at("env").value == "ar1");
  CHECK(f.sections.at("experiment").entries.at("env").line == 3);
  CHECK(f.sections.at("ar1").entries.at("n").value == "50");

  const auto error_of = [](const std::string& text) {
    try {
      parse_config_text(text, "t.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("[experiment]\nenv = ar1\nbogus line\n").find("t.cfg:3:") == 0);
  CHECK(error_of("env = ar1\n").find("t.cfg:1:") == 0);
  CHECK(error_of("[a]\n[a]\n").find("t.cfg:2:") == 0);
  CHECK(error_of("[a]\nk = 1\nk = 2\n").find("t.cfg:3:") == 0);
  CHECK(error_of("[a]\nk =\n").find("t.cfg:2:") == 0);
  CHECK(error_of("[a\n").find("t.cfg:1:") == 0);
  CHECK_THROWS_AS(load_config_file("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("config semantics") {
  CHECK(config_error("[experiment]\nenv = garch\n").find("t.cfg:2:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\nreplications = -3\n").find("t.cfg:3:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\nlevels = 0.9, 1.5\n").find("t.cfg:3:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\ncolour = red\n").find("t.cfg:3:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[ar1]\ntheta = 0.1, 0.2\n").find("t.cfg:4:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[ar1]\nnum_contexts = 4\n").find("t.cfg:4:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[ar1]\nnoise_sd = -1\n").find("t.cfg:4:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[ar1]\nn = 12.5\n").find("t.cfg:4:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[wdec]\npilot_size = 3\n").find("t.cfg:4:") == 0);
  CHECK(config_error("[experiment]\nenv = ar1\n[plotting]\nx = 1\n").find("t.cfg:3:") == 0);
  CHECK(config_error("[ar1]\nn = 5\n").find("missing [experiment]") != std::string::npos);

  const RunManifest m = manifest_from_config(
      parse_config_text("[experiment]\nenv = two_armed\n[two_armed]\ns0 = 4.5\n[wdec]\nlambda = auto\n"));
  CHECK(m.experiment.env.s0_rule == S0Rule::kConstant);
  CHECK(m.experiment.env.s0_constant == 4.5);
  CHECK(std::isnan(m.experiment.wdec_lambda));
  CHECK(m.experiment.env.theta_star.dim() == 2);
}

TEST_CASE("manifest round-trip") {
  const RunManifest m = manifest_from_config(parse_config_text(kContextualCfg));
  const std::string text = serialize_manifest(m);
  const RunManifest back = manifest_from_config(parse_config_text(text, "manifest"));
  CHECK(serialize_manifest(back) == text);
  CHECK(back.experiment.levels == m.experiment.levels);
  CHECK(back.experiment.wdec_lambda == 10.0);
  CHECK(back.experiment.env.n == 150);
  CHECK(concrete_s0_rule(EnvKind::kContextual, S0Rule::kDefault) == back.experiment.env.s0_rule);
  CHECK(back.experiment.target == Target::kRegion);

  RunManifest odd = m;
  odd.experiment.env.theta_star = Vec{0.1, 1.0 / 3.0};
  odd.experiment.beta = 0.7;
  const RunManifest odd_back = manifest_from_config(parse_config_text(serialize_manifest(odd)));
  CHECK(odd_back.experiment.env.theta_star[1] == 1.0 / 3.0);
  CHECK(odd_back.experiment.beta == 0.7);
}

TEST_CASE("number formatting round-trips exactly") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 0.1, 1e-300, 6.02214076e23, -2.5, 5e-324,
                   std::numeric_limits<double>::max()}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(std::isnan(parse_double("nan")));
  CHECK(parse_double("-inf") == -INFINITY);
  CHECK_THROWS_AS(parse_double("1.5x"), DataError);
  CHECK_THROWS_AS(parse_double(""), DataError);
}

TEST_CASE("csv parsing") {
  const CsvTable t = parse_csv("a,b\n1,2\n3,4\n");
  CHECK(t.rows.size() == 2);
  CHECK(t.column("b") == 1);
  CHECK_THROWS_AS(t.column("c"), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), DataError);
  CHECK_THROWS_AS(parse_csv(""), DataError);
}

TEST_CASE("simulate writes a reproducible trajectory") {
  TempDir dir("simulate");
  write(dir / "ar1.cfg", "[experiment]\nenv = ar1\nseed = 7\n[ar1]\nn = 5\n");
  CHECK(run_args({"simulate", "--config", dir / "ar1.cfg", "--out", dir / "a"}) == kExitOk);
  CHECK(run_args({"simulate", "--config", dir / "ar1.cfg", "--out", dir / "b"}) == kExitOk);
  const std::string a = read(dir / "a/trajectory.csv");
  CHECK(a == read(dir / "b/trajectory.csv"));
  const CsvTable t = parse_csv(a);
  CHECK(t.rows.size() == 5);
  CHECK(t.header == std::vector<std::string>{"t", "x_1", "y", "w_1"});
  CHECK(parse_double(t.rows[0][1]) == 0.0);
  for (std::size_t i = 1; i < t.rows.size(); ++i) CHECK(t.rows[i][1] == t.rows[i - 1][2]);
  CHECK(fs::exists(dir / "a/manifest.cfg"));

  CHECK(run_args({"simulate", "--config", dir / "ar1.cfg", "--out", dir / "c", "--seed", "8"}) == kExitOk);
  CHECK(read(dir / "c/trajectory.csv") != a);

  write(dir / "ta.cfg", "[experiment]\nenv = two_armed\n[two_armed]\nn = 50\n");
  CHECK(run_args({"simulate", "--config", dir / "ta.cfg", "--out", dir / "d"}) == kExitOk);
  const CsvTable ta = parse_csv(read(dir / "d/trajectory.csv"));
  CHECK(ta.rows.size() == 50);
  for (const auto& r : ta.rows) CHECK(parse_double(r[1]) + parse_double(r[2]) == 1.0);
}

TEST_CASE("coverage writes one summary row per method and level") {
  TempDir dir("coverage");
  write(dir / "c.cfg", kContextualCfg);
  REQUIRE(run_args({"coverage", "--config", dir / "c.cfg", "--out", dir / "o"}) == kExitOk);
  const CsvTable s = parse_csv(read(dir / "o/summary.csv"));
  CHECK(s.header == std::vector<std::string>{"method", "level", "coverage", "coverage_se", "width_or_logvol",
                                             "width_se", "R", "degenerate_count"});
  CHECK(s.rows.size() == 12);
  for (const auto& r : s.rows) {
    const double c = parse_double(r[2]);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(r[6] == "12");
  }

  // The records file alone reproduces the summary.
  const CsvTable rec = parse_csv(read(dir / "o/records.csv"));
  CHECK(rec.rows.size() == 12 * 12);
  CHECK(summary_csv(summarize(std::span<const OutcomeRow>(outcome_rows_from_records(rec)))) ==
        read(dir / "o/summary.csv"));

  // Re-running the written manifest reproduces every output byte for byte.
  REQUIRE(run_args({"coverage", "--config", dir / "o/manifest.cfg", "--out", dir / "p", "--threads", "3"}) ==
          kExitOk);
  CHECK(read(dir / "p/records.csv") == read(dir / "o/records.csv"));
  CHECK(read(dir / "p/summary.csv") == read(dir / "o/summary.csv"));
  CHECK(read(dir / "p/manifest.cfg") == read(dir / "o/manifest.cfg"));

  write(dir / "one.cfg", "[experiment]\nenv = two_armed\nmethods = ols\nlevels = 0.8, 0.9\nreplications = 1\n");
  REQUIRE(run_args({"coverage", "--config", dir / "one.cfg", "--out", dir / "q"}) == kExitOk);
  const CsvTable one = parse_csv(read(dir / "q/summary.csv"));
  CHECK(one.rows.size() == 2);
  for (const auto& r : one.rows) {
    CHECK(r[0] == "ols");
    CHECK(r[3] == "nan");
    CHECK(r[5] == "nan");
  }
}

TEST_CASE("pilot prints the calibrated lambda") {
  TempDir dir("pilot");
  write(dir / "p.cfg", "[experiment]\nenv = two_armed\nseed = 3\n[wdec]\npilot_size = 20\n");
  std::string text;
  REQUIRE(run_args({"pilot", "--config", dir / "p.cfg", "--out", dir / "o"}, &text) == kExitOk);
  CHECK(text.find("lambda = ") != std::string::npos);
  const RunManifest m = manifest_from_config(load_config_file(dir / "o/manifest.cfg"));
  CHECK(m.experiment.wdec_lambda == wdec_lambda_pilot(m.experiment.env, 20, 3));
}

TEST_CASE("plots") {
  TempDir dir("plot");
  write(dir / "c.cfg", kContextualCfg);
  REQUIRE(run_args({"coverage", "--config", dir / "c.cfg", "--out", dir / "o"}) == kExitOk);
  const std::string records = dir / "o/records.csv";
  // Region targets carry no scalar standardized error to histogram.
  CHECK(run_args({"plot", "--records", records, "--kind", "hist", "--out", dir / "o"}) == kExitData);
  write(dir / "k.cfg", R"([experiment]
env = contextual
target = coordinate
replications = 30
[contextual]
n = 150
[wdec]
lambda = 10
)");
  REQUIRE(run_args({"coverage", "--config", dir / "k.cfg", "--out", dir / "k"}) == kExitOk);
  CHECK(run_args({"plot", "--records", dir / "k/records.csv", "--kind", "hist", "--out", dir / "k"}) == kExitOk);
  const std::string hist = read(dir / "k/hist.svg");
  CHECK(well_formed_xml(hist));
  CHECK(hist.find("polyline") != std::string::npos);
  CHECK(run_args({"plot", "--records", records, "--kind", "coverage_curve", "--output", dir / "curve.svg"}) ==
        kExitOk);
  const std::string curve = read(dir / "curve.svg");
  CHECK(well_formed_xml(curve));
  CHECK(curve.find("alee") != std::string::npos);
  CHECK(run_args({"plot", "--records", records, "--kind", "coverage_curve", "--x", "n", "--output",
                  dir / "n.svg"}) == kExitOk);
  CHECK(well_formed_xml(read(dir / "n.svg")));

  write(dir / "empty.csv", "");
  CHECK(run_args({"plot", "--records", dir / "empty.csv", "--kind", "hist", "--out", dir / "o"}) == kExitData);
  write(dir / "nocol.csv", "rep,method\n0,alee\n");
  std::string text;
  CHECK(run_args({"plot", "--records", dir / "nocol.csv", "--kind", "hist", "--out", dir / "o"}, &text) ==
        kExitData);
  CHECK(text.find("standardized_error") != std::string::npos);
  CHECK(run_args({"plot", "--records", dir / "missing.csv", "--kind", "hist"}) == kExitData);
  CHECK(run_args({"plot", "--records", records, "--kind", "pie"}) == kExitConfig);
}

TEST_CASE("svg writers escape titles and stay well formed") {
  const std::string h = svg_histogram({{"a <b> & \"c\"", {0.1, -0.3, 2.0, 12.0}}, {"empty", {}}}, 10);
  CHECK(well_formed_xml(h));
  CHECK(h.find("a &lt;b&gt; &amp;") != std::string::npos);
  const std::string c =
      svg_coverage_curve({{"s", {{0.8, 0.79, 0.01}, {0.9, 0.91, kNaN}}}, {"t", {}}}, "nominal", true);
  CHECK(well_formed_xml(c));
}

TEST_CASE("exit codes") {
  TempDir dir("exit");
  CHECK(run_args({"--help"}) == kExitOk);
  CHECK(run_args({}) == kExitConfig);
  CHECK(run_args({"frobnicate"}) == kExitConfig);
  CHECK(run_args({"coverage"}) == kExitConfig);
  CHECK(run_args({"coverage", "--config", dir / "missing.cfg"}) == kExitConfig);
  write(dir / "bad.cfg", "[experiment]\nenv = ar1\nthis is not valid\n");
  std::string text;
  CHECK(run_args({"coverage", "--config", dir / "bad.cfg", "--out", dir / "o"}, &text) == kExitConfig);
  CHECK(text.find("bad.cfg:3:") != std::string::npos);
  write(dir / "n.cfg", "[experiment]\nenv = two_armed\n[two_armed]\nn = 2\n");
  CHECK(run_args({"simulate", "--config", dir / "n.cfg", "--out", dir / "o"}) == kExitConfig);
}
