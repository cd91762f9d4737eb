#pragma once

#include <string>
#include <vector>

#include "sdnls/errors.hpp"
#include "sdnls/experiments.hpp"

namespace sdnls {

/// Config rejection that names the offending key and 1-based line.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& message, std::string key, int line);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

struct RunConfig {
  std::vector<Scenario> scenarios;
  std::string output_dir = "sdnls-out";
  int verbosity = 1;
  int threads = 1;

  bool operator==(const RunConfig&) const = default;
};

/// Parses the INI-style format: `[section]` headers and `key = value` lines,
/// `#` or `;` comments. Each `[scenario]` header opens a new scenario and the
/// sections after it configure that scenario; `[output]` is global. A file
/// without any `[scenario]` header describes a single scenario.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_config_text(c)) == c.
std::string to_config_text(const RunConfig& config);

}  // namespace sdnls
