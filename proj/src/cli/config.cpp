#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <set>

#include "alee/cli.hpp"

namespace alee::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
    if (!piece.empty()) out.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

[[noreturn]] void fail(const ConfigFile& file, int line, const std::string& message) {
  throw ConfigError(file.source + ":" + std::to_string(line) + ": " + message);
}

// Typed access to one section with line-numbered errors.
class SectionReader {
 public:
  SectionReader(const ConfigFile& file, const std::string& name) : file_(file), name_(name) {
    auto it = file.sections.find(name);
    if (it != file.sections.end()) section_ = &it->second;
  }

  bool present() const { return section_ != nullptr; }

  const ConfigEntry* find(const std::string& key) {
    used_.insert(key);
    if (!section_) return nullptr;
    auto it = section_->entries.find(key);
    return it == section_->entries.end() ? nullptr : &it->second;
  }

  std::optional<std::string> text(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> real(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    try {
      const double v = parse_double(e->value);
      if (!std::isfinite(v)) throw DataError("not finite");
      return v;
    } catch (const DataError&) {
      fail(file_, e->line, "'" + key + "' expects a number, got '" + e->value + "'");
    }
  }

  std::optional<long long> integer(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    long long v = 0;
    const auto* b = e->value.data();
    const auto [p, ec] = std::from_chars(b, b + e->value.size(), v);
    if (ec != std::errc() || p != b + e->value.size()) {
      fail(file_, e->line, "'" + key + "' expects an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<std::uint64_t> unsigned64(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    std::uint64_t v = 0;
    const auto* b = e->value.data();
    const auto [p, ec] = std::from_chars(b, b + e->value.size(), v);
    if (ec != std::errc() || p != b + e->value.size()) {
      fail(file_, e->line, "'" + key + "' expects an unsigned integer, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<std::vector<double>> reals(const std::string& key) {
    const ConfigEntry* e = find(key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    for (const auto& piece : split_list(e->value)) {
      try {
        out.push_back(parse_double(piece));
      } catch (const DataError&) {
        fail(file_, e->line, "'" + key + "' expects a list of numbers, got '" + piece + "'");
      }
    }
    return out;
  }

  int line(const std::string& key) const {
    if (!section_) return 0;
    auto it = section_->entries.find(key);
    return it == section_->entries.end() ? section_->line : it->second.line;
  }

  int header_line() const { return section_ ? section_->line : 0; }

  // Any key not consumed by the reader is an error.
  void reject_unknown() const {
    if (!section_) return;
    for (const auto& [key, entry] : section_->entries) {
      if (!used_.count(key)) fail(file_, entry.line, "unknown key '" + key + "' in [" + name_ + "]");
    }
  }

 private:
  const ConfigFile& file_;
  std::string name_;
  const ConfigSection* section_ = nullptr;
  std::set<std::string> used_;
};

// Converts library validation failures into line-numbered config errors.
template <typename F>
auto checked(const ConfigFile& file, int line, F&& f) {
  try {
    return f();
  } catch (const InvalidInput& e) {
    fail(file, line, e.what());
  }
}

}  // namespace

ConfigFile parse_config_text(std::string_view text, std::string source) {
  ConfigFile file;
  file.source = std::move(source);
  ConfigSection* current = nullptr;
  std::string current_name;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto hash = raw.find_first_of("#;");
    const std::string_view line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(file, line_no, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name.empty()) fail(file, line_no, "empty section name");
      if (file.sections.count(name)) fail(file, line_no, "duplicate section [" + name + "]");
      current = &file.sections[name];
      current->line = line_no;
      current_name = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(file, line_no, "expected 'key = value'");
    if (!current) fail(file, line_no, "key outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(file, line_no, "empty key");
    if (value.empty()) fail(file, line_no, "empty value for '" + key + "'");
    if (current->entries.count(key)) {
      fail(file, line_no, "duplicate key '" + key + "' in [" + current_name + "]");
    }
    current->entries[key] = {value, line_no};
  }
  return file;
}

ConfigFile load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

S0Rule concrete_s0_rule(EnvKind kind, S0Rule rule) {
  if (rule != S0Rule::kDefault) return rule;
  switch (kind) {
    case EnvKind::kTwoArmed: return S0Rule::kE2LogN;
    case EnvKind::kAr1: return S0Rule::kE2N;
    case EnvKind::kContextual:
    case EnvKind::kIidFixed: return S0Rule::kLogNIdentity;
  }
  return rule;
}

RunManifest manifest_from_config(const ConfigFile& file) {
  static const std::set<std::string> kKnown = {"experiment", "two_armed", "ar1", "contextual",
                                               "iid_fixed",  "wdec",      "output"};
  for (const auto& [name, section] : file.sections) {
    if (!kKnown.count(name)) fail(file, section.line, "unknown section [" + name + "]");
  }

  RunManifest m;
  ExperimentConfig& exp = m.experiment;

  SectionReader ex(file, "experiment");
  if (!ex.present()) throw ConfigError(file.source + ": missing [experiment] section");
  const auto env_text = ex.text("env");
  if (!env_text) fail(file, ex.header_line(), "[experiment] needs 'env'");
  const EnvKind kind = checked(file, ex.line("env"), [&] { return parse_env(*env_text); });
  exp.env = default_env(kind);

  if (auto v = ex.text("methods")) {
    exp.methods.clear();
    for (const auto& name : split_list(*v)) {
      exp.methods.push_back(checked(file, ex.line("methods"), [&] { return parse_method(name); }));
    }
    if (exp.methods.empty()) fail(file, ex.line("methods"), "empty method list");
  }
  if (auto v = ex.reals("levels")) {
    for (double l : *v) {
      if (!(l > 0.0 && l < 1.0)) fail(file, ex.line("levels"), "levels must lie in (0, 1)");
    }
    exp.levels = *v;
  }
  if (auto v = ex.integer("replications")) {
    if (*v < 1) fail(file, ex.line("replications"), "replications must be >= 1");
    exp.replications = static_cast<long>(*v);
  }
  if (auto v = ex.unsigned64("seed")) exp.base_seed = *v;
  if (auto v = ex.real("beta")) exp.beta = *v;
  if (auto v = ex.text("target")) {
    exp.target = checked(file, ex.line("target"), [&] { return parse_target(*v); });
  }
  if (auto v = ex.integer("target_coordinate")) exp.target_coordinate = static_cast<int>(*v);
  if (auto v = ex.integer("replication")) m.replication = static_cast<long>(*v);
  ex.reject_unknown();

  // Only the chosen environment's section is read; the others must still be well formed.
  for (EnvKind k : {EnvKind::kTwoArmed, EnvKind::kAr1, EnvKind::kContextual, EnvKind::kIidFixed}) {
    const std::string name(env_name(k));
    SectionReader es(file, name);
    EnvConfig scratch = default_env(k);
    EnvConfig& env = k == kind ? exp.env : scratch;
    if (auto v = es.integer("n")) env.n = static_cast<long>(*v);
    bool theta_given = false;
    if (auto v = es.reals("theta")) {
      theta_given = true;
      if (v->empty() || v->size() > static_cast<std::size_t>(kMaxDim)) {
        fail(file, es.line("theta"), "theta needs between 1 and 8 entries");
      }
      Vec t(static_cast<int>(v->size()));
      for (std::size_t i = 0; i < v->size(); ++i) t[static_cast<int>(i)] = (*v)[i];
      env.theta_star = t;
    }
    if (auto v = es.real("noise_sd")) {
      if (!(std::isfinite(*v) && *v >= 0.0)) {
        fail(file, es.line("noise_sd"), "noise_sd must be finite and non-negative");
      }
      env.noise_sd = *v;
    }
    bool rule_given = false;
    if (auto v = es.text("s0_rule")) {
      env.s0_rule = checked(file, es.line("s0_rule"), [&] { return parse_s0_rule(*v); });
      rule_given = true;
    }
    if (auto v = es.real("s0")) {
      env.s0_constant = *v;
      if (!rule_given) env.s0_rule = S0Rule::kConstant;
    }
    if (k == EnvKind::kContextual) {
      if (auto v = es.integer("num_contexts")) env.num_contexts = static_cast<int>(*v);
    }
    if (k == EnvKind::kIidFixed) {
      if (auto v = es.unsigned64("design_seed")) env.design_seed = *v;
    }
    es.reject_unknown();
    if (k == kind) {
      // Dimension mismatches are the usual failure; point at theta when it was given.
      const int at = theta_given ? es.line("theta") : es.present() ? es.header_line() : ex.line("env");
      checked(file, at, [&] {
        env.validate();
        return 0;
      });
    }
  }

  SectionReader wd(file, "wdec");
  if (auto v = wd.text("lambda")) {
    if (*v == "auto") {
      exp.wdec_lambda = kNaN;
    } else if (auto x = wd.real("lambda")) {
      if (!(*x > 0.0)) fail(file, wd.line("lambda"), "lambda must be positive or 'auto'");
      exp.wdec_lambda = *x;
    }
  }
  if (auto v = wd.integer("pilot_size")) exp.pilot_size = static_cast<int>(*v);
  wd.reject_unknown();
  if (exp.pilot_size < 10) fail(file, wd.line("pilot_size"), "pilot_size must be >= 10");

  SectionReader out(file, "output");
  if (auto v = out.text("trajectory")) m.trajectory_file = *v;
  if (auto v = out.text("summary")) m.summary_file = *v;
  if (auto v = out.text("records")) m.records_file = *v;
  out.reject_unknown();

  checked(file, ex.header_line(), [&] {
    exp.validate();
    return 0;
  });
  if (m.replication < 0) fail(file, ex.line("replication"), "replication must be >= 0");
  return m;
}

namespace {

// Shortest representation that parses back to the same double.
std::string shortest(double v) {
  if (!std::isfinite(v)) return format_double(v);
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string join_reals(std::span<const double> values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += shortest(values[i]);
  }
  return s;
}

}  // namespace

std::string serialize_manifest(const RunManifest& m) {
  const ExperimentConfig& exp = m.experiment;
  const EnvConfig& env = exp.env;
  std::ostringstream os;
  os << "# resolved run manifest\n";
  os << "[experiment]\n";
  os << "env = " << env_name(env.kind) << "\n";
  os << "methods = ";
  for (std::size_t i = 0; i < exp.methods.size(); ++i) {
    os << (i ? ", " : "") << method_name(exp.methods[i]);
  }
  os << "\n";
  os << "levels = " << join_reals(exp.levels) << "\n";
  os << "replications = " << exp.replications << "\n";
  os << "seed = " << exp.base_seed << "\n";
  os << "beta = " << shortest(exp.beta) << "\n";
  os << "target = " << target_name(exp.resolved_target()) << "\n";
  os << "target_coordinate = " << exp.target_coordinate << "\n";
  os << "replication = " << m.replication << "\n";
  os << "\n[" << env_name(env.kind) << "]\n";
  os << "n = " << env.n << "\n";
  os << "theta = " << join_reals(env.theta_star.values()) << "\n";
  os << "noise_sd = " << shortest(env.noise_sd) << "\n";
  const S0Rule rule = concrete_s0_rule(env.kind, env.s0_rule);
  os << "s0_rule = " << s0_rule_name(rule) << "\n";
  if (rule == S0Rule::kConstant) {
    os << "s0 = " << shortest(env.s0_constant) << "\n";
  } else if (env.n >= 3) {
    const Offset o = resolve_offset(env);
    const double value = std::holds_alternative<double>(o) ? std::get<double>(o)
                                                           : std::get<SymMatrix>(o)(0, 0);
    os << "# s0 resolves to " << shortest(value)
       << (std::holds_alternative<double>(o) ? "" : " * I") << "\n";
  }
  if (env.kind == EnvKind::kContextual) os << "num_contexts = " << env.num_contexts << "\n";
  if (env.kind == EnvKind::kIidFixed) os << "design_seed = " << env.design_seed << "\n";
  os << "\n[wdec]\n";
  os << "lambda = " << (std::isnan(exp.wdec_lambda) ? std::string("auto")
                                                     : shortest(exp.wdec_lambda))
     << "\n";
  os << "pilot_size = " << exp.pilot_size << "\n";
  os << "\n[output]\n";
  os << "trajectory = " << m.trajectory_file << "\n";
  os << "summary = " << m.summary_file << "\n";
  os << "records = " << m.records_file << "\n";
  return os.str();
}

}  // namespace alee::cli
