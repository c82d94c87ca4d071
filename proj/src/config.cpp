#include "topoflow/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace topoflow {

ModelParams RunConfig::model() const {
  return {alpha_L, alpha_U, u_t, dt};
}

OptimizerSettings RunConfig::optimizer() const {
  OptimizerSettings settings;
  settings.eps_theta = eps_theta;
  settings.max_iterations = max_iterations;
  settings.kappa_initial = kappa_initial;
  settings.kappa_min = kappa_min;
  settings.volume_lower = V_L;
  settings.volume_upper = V_U;
  return settings;
}

PenaltyParams RunConfig::penalty() const {
  return {gamma, delta, r_min, exp_clamp_min, exp_clamp_max};
}

PenaltyTdVariant RunConfig::variant() const {
  return penalty_td_variant_from_string(penalty_td_variant);
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct Field {
  std::string name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& where,
                            const std::string& what) {
  throw ConfigError("config: key '" + key + "' (" + where + "): " + what);
}

double parse_double(const std::string& key, const std::string& where,
                    const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) bad_value(key, where, "expected a number");
  return value;
}

int parse_int(const std::string& key, const std::string& where, const std::string& text) {
  int value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) bad_value(key, where, "expected an integer");
  return value;
}

std::string format_shortest(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    const auto add_int = [&f](const char* name, int RunConfig::*member) {
      f.push_back({name,
                   [name, member](RunConfig& c, const std::string& v, const std::string& w) {
                     c.*member = parse_int(name, w, v);
                   },
                   [member](const RunConfig& c) { return std::to_string(c.*member); }});
    };
    const auto add_double = [&f](const char* name, double RunConfig::*member) {
      f.push_back({name,
                   [name, member](RunConfig& c, const std::string& v, const std::string& w) {
                     c.*member = parse_double(name, w, v);
                   },
                   [member](const RunConfig& c) { return format_shortest(c.*member); }});
    };
    const auto add_string = [&f](const char* name, std::string RunConfig::*member) {
      f.push_back({name,
                   [member](RunConfig& c, const std::string& v, const std::string&) {
                     c.*member = v;
                   },
                   [member](const RunConfig& c) { return c.*member; }});
    };
    add_int("mesh_n", &RunConfig::mesh_n);
    add_double("alpha_L", &RunConfig::alpha_L);
    add_double("alpha_U", &RunConfig::alpha_U);
    add_double("u_t", &RunConfig::u_t);
    add_double("dt", &RunConfig::dt);
    add_double("V_L", &RunConfig::V_L);
    add_double("V_U", &RunConfig::V_U);
    add_double("gamma", &RunConfig::gamma);
    add_double("delta", &RunConfig::delta);
    add_double("eps_theta", &RunConfig::eps_theta);
    add_int("max_iterations", &RunConfig::max_iterations);
    add_int("deflation_rounds", &RunConfig::deflation_rounds);
    add_string("penalty_td_variant", &RunConfig::penalty_td_variant);
    add_string("output_dir", &RunConfig::output_dir);
    add_double("r_min", &RunConfig::r_min);
    add_double("exp_clamp_min", &RunConfig::exp_clamp_min);
    add_double("exp_clamp_max", &RunConfig::exp_clamp_max);
    add_double("kappa_initial", &RunConfig::kappa_initial);
    add_double("kappa_min", &RunConfig::kappa_min);
    return f;
  }();
  return table;
}

const Field* find_field(const std::string& name) {
  for (const auto& field : fields()) {
    if (field.name == name) return &field;
  }
  return nullptr;
}

void apply(RunConfig& config, const std::string& key, const std::string& value,
           const std::string& where) {
  const Field* field = find_field(key);
  if (field == nullptr) {
    throw ConfigError("config: unknown key '" + key + "' (" + where + ")");
  }
  field->set(config, value, where);
}

void require(bool condition, const std::string& key, const std::string& what) {
  if (!condition) throw ConfigError("config: key '" + key + "': " + what);
}

}  // namespace

RunConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  RunConfig config;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_number);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: expected 'key = value' (" + where + ")");
    }
    apply(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }
  for (const auto& [key, value] : overrides) {
    apply(config, key, value, "command line");
  }
  validate(config);
  return config;
}

RunConfig parse_config_file(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), overrides);
}

void validate(const RunConfig& c) {
  require(c.mesh_n >= 1, "mesh_n", "must be >= 1");
  require(c.alpha_L > 0.0, "alpha_L", "must be positive");
  require(c.alpha_U > 0.0, "alpha_U", "must be positive");
  require(c.alpha_L <= c.alpha_U, "alpha_L", "must not exceed alpha_U");
  require(c.u_t > 0.0, "u_t", "must be positive");
  require(c.dt > 0.0, "dt", "must be positive");
  require(c.V_L > 0.0 && c.V_L <= c.V_U && c.V_U <= 1.0, "V_L",
          "volume bounds must satisfy 0 < V_L <= V_U <= 1");
  require(c.gamma > 0.0, "gamma", "must be positive");
  require(c.delta > 0.0, "delta", "must be positive");
  require(c.eps_theta > 0.0 && c.eps_theta < std::acos(-1.0) / 2.0, "eps_theta",
          "must lie in (0, pi/2)");
  require(c.max_iterations >= 1, "max_iterations", "must be >= 1");
  require(c.deflation_rounds >= 0, "deflation_rounds", "must be >= 0");
  require(find_field("penalty_td_variant") != nullptr &&
              (c.penalty_td_variant == "paper" || c.penalty_td_variant == "derived"),
          "penalty_td_variant", "must be 'paper' or 'derived'");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  require(c.r_min > 0.0, "r_min", "must be positive");
  require(c.exp_clamp_min < c.exp_clamp_max, "exp_clamp_min",
          "must be below exp_clamp_max");
  require(c.kappa_min > 0.0 && c.kappa_min <= c.kappa_initial && c.kappa_initial <= 1.0,
          "kappa_min", "step bounds must satisfy 0 < kappa_min <= kappa_initial <= 1");
}

std::string serialize_config(const RunConfig& config) {
  std::ostringstream out;
  for (const auto& field : fields()) {
    out << field.name << " = " << field.get(config) << "\n";
  }
  return out.str();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> names;
    for (const auto& field : fields()) names.push_back(field.name);
    return names;
  }();
  return keys;
}

}  // namespace topoflow
