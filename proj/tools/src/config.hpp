#pragma once

// Run configuration shared by every subcommand: built-in defaults, then a
// `key = value` file, then command-line flags.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace coalesce::cli {

enum class Format { csv, json };

struct RunConfig {
  std::string subcommand;
  std::string figure;

  double zeta = -10.0;
  double zeta_m = -196.6;
  double x = 0.0;
  std::optional<double> k_min;
  std::optional<double> k_max;
  std::size_t points = 2001;
  std::optional<double> x_min;
  std::optional<double> x_max;
  std::size_t x_points = 201;
  std::optional<double> zeta_m_min;
  std::optional<double> zeta_m_max;
  std::size_t sweep_points = 25;

  int n_layers = 3;
  double zeta_layer = 1.0;
  double k = 6.283185307179586;
  std::optional<double> spacing;

  std::optional<double> amplitude;
  std::optional<double> mass;
  double mech_freq = 6.283185307179586e5;
  double temperature = 0.0;
  double wavelength = 1e-6;

  int grid_per_kappa = 20;
  double refine_tol = 1e-10;
  unsigned threads = 0;

  std::optional<Format> format;
  std::string output_path;
};

/// Malformed input: bad syntax, unreadable files, unparsable values.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string token, const std::string& message)
      : std::runtime_error(message), token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

/// Canonical key for a flag or file key (dashes become underscores, aliases
/// resolved). Empty if the key is unknown.
std::string canonical_key(std::string_view key);

/// Every canonical key, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one field from its textual value. Throws ParseError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

struct ConfigEntry {
  std::string key;
  std::string value;
  int line;
};

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Throws ParseError on a line without '=' or an empty key.
std::vector<ConfigEntry> parse_config(std::string_view text);

/// Reads and parses a file. Throws ParseError if it cannot be read.
std::vector<ConfigEntry> read_config_file(const std::string& path);

/// Applies entries onto cfg; unknown keys are returned as warnings.
std::vector<std::string> apply_entries(RunConfig& cfg, const std::vector<ConfigEntry>& entries);

/// Defaults with the thread count taken from COALESCE_THREADS when set.
RunConfig default_config();

/// Loads a configuration file on top of the defaults.
RunConfig load_config(const std::string& path, std::vector<std::string>* warnings = nullptr);

}  // namespace coalesce::cli
