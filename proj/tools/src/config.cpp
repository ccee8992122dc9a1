#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace coalesce::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw ParseError("invalid_value", key + ": not a number: '" + value + "'");
  }
  return out;
}

long long parse_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ParseError("invalid_value", key + ": not an integer: '" + value + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  const long long n = parse_integer(key, value);
  if (n < 0) throw ParseError("invalid_value", key + ": must not be negative");
  return static_cast<std::size_t>(n);
}

const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> table{
      {"kmin", "k_min"}, {"kmax", "k_max"}, {"layers", "n_layers"}, {"output", "output_path"},
      {"o", "output_path"}, {"zm", "zeta_m"}};
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "zeta",       "zeta_m",     "x",           "k_min",       "k_max",        "points",
      "x_min",      "x_max",      "x_points",    "zeta_m_min",  "zeta_m_max",   "sweep_points",
      "n_layers",   "zeta_layer", "k",           "spacing",     "amplitude",    "mass",
      "mech_freq",  "temperature", "wavelength", "grid_per_kappa", "refine_tol", "threads",
      "format",     "output_path"};
  return keys;
}

std::string canonical_key(std::string_view key) {
  std::string k = trim(key);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '-', '_');
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (const auto it = aliases().find(k); it != aliases().end()) k = it->second;
  const auto& keys = config_keys();
  return std::find(keys.begin(), keys.end(), k) != keys.end() ? k : std::string{};
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string k = canonical_key(key);
  if (k == "zeta") cfg.zeta = parse_double(k, value);
  else if (k == "zeta_m") cfg.zeta_m = parse_double(k, value);
  else if (k == "x") cfg.x = parse_double(k, value);
  else if (k == "k_min") cfg.k_min = parse_double(k, value);
  else if (k == "k_max") cfg.k_max = parse_double(k, value);
  else if (k == "points") cfg.points = parse_count(k, value);
  else if (k == "x_min") cfg.x_min = parse_double(k, value);
  else if (k == "x_max") cfg.x_max = parse_double(k, value);
  else if (k == "x_points") cfg.x_points = parse_count(k, value);
  else if (k == "zeta_m_min") cfg.zeta_m_min = parse_double(k, value);
  else if (k == "zeta_m_max") cfg.zeta_m_max = parse_double(k, value);
  else if (k == "sweep_points") cfg.sweep_points = parse_count(k, value);
  else if (k == "n_layers") cfg.n_layers = static_cast<int>(parse_integer(k, value));
  else if (k == "zeta_layer") cfg.zeta_layer = parse_double(k, value);
  else if (k == "k") cfg.k = parse_double(k, value);
  else if (k == "spacing") cfg.spacing = parse_double(k, value);
  else if (k == "amplitude") cfg.amplitude = parse_double(k, value);
  else if (k == "mass") cfg.mass = parse_double(k, value);
  else if (k == "mech_freq") cfg.mech_freq = parse_double(k, value);
  else if (k == "temperature") cfg.temperature = parse_double(k, value);
  else if (k == "wavelength") cfg.wavelength = parse_double(k, value);
  else if (k == "grid_per_kappa") cfg.grid_per_kappa = static_cast<int>(parse_integer(k, value));
  else if (k == "refine_tol") cfg.refine_tol = parse_double(k, value);
  else if (k == "threads") cfg.threads = static_cast<unsigned>(parse_count(k, value));
  else if (k == "format") {
    const std::string v = trim(value);
    if (v == "csv") cfg.format = Format::csv;
    else if (v == "json") cfg.format = Format::json;
    else throw ParseError("invalid_value", "format: expected csv or json, got '" + v + "'");
  } else if (k == "output_path") cfg.output_path = trim(value);
  else throw ParseError("unknown_key", "unknown key '" + key + "'");
}

std::vector<ConfigEntry> parse_config(std::string_view text) {
  std::vector<ConfigEntry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string content = trim(std::string_view(raw).substr(0, raw.find('#')));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw ParseError("malformed_config", "line " + std::to_string(line) + ": expected 'key = value'");
    }
    std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty()) {
      throw ParseError("malformed_config", "line " + std::to_string(line) + ": empty key");
    }
    entries.push_back({std::move(key), trim(std::string_view(content).substr(eq + 1)), line});
  }
  return entries;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("unreadable_config", "cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<std::string> apply_entries(RunConfig& cfg, const std::vector<ConfigEntry>& entries) {
  std::vector<std::string> warnings;
  for (const ConfigEntry& e : entries) {
    if (canonical_key(e.key).empty()) {
      warnings.push_back("unknown key '" + e.key + "' on line " + std::to_string(e.line) + " ignored");
      continue;
    }
    apply_setting(cfg, e.key, e.value);
  }
  return warnings;
}

RunConfig default_config() {
  RunConfig cfg;
  if (const char* env = std::getenv("COALESCE_THREADS"); env != nullptr && *env != '\0') {
    try {
      cfg.threads = static_cast<unsigned>(parse_count("COALESCE_THREADS", env));
    } catch (const ParseError&) {
      cfg.threads = 0;
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
  RunConfig cfg = default_config();
  auto w = apply_entries(cfg, read_config_file(path));
  if (warnings != nullptr) warnings->insert(warnings->end(), w.begin(), w.end());
  return cfg;
}

}  // namespace coalesce::cli
