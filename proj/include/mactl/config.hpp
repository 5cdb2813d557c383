#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "mactl/harness.hpp"

namespace mactl {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Keys recognised in config text and --set overrides.
const std::vector<std::string>& config_keys();

/// Applies one key/value pair; throws ConfigError on unknown keys or
/// malformed values.
void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses flat `key = value` text. Blank lines and lines starting with '#'
/// are ignored. A scenario must be given either in the text or as
/// `default_scenario`.
ExperimentConfig parse_config(std::string_view text, std::string_view default_scenario = {});

/// Throws ConfigError if the config is out of range.
void validate_config(const ExperimentConfig& cfg);

/// Canonical text form: every key, fixed order. parse_config reads it back
/// to an equal config.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace mactl
