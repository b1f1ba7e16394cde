#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccnet/montecarlo.hpp"

namespace ccnet {

/// Parses a flat `key = value` configuration (see README for the schema),
/// applies `key=value` overrides in order and validates the result. Every
/// failure is a ConfigError naming the offending key.
ExperimentConfig load_config(std::filesystem::path const& path, std::vector<std::string> const& overrides = {});

ExperimentConfig parse_config(std::string const& text, std::vector<std::string> const& overrides = {},
                              std::string const& source = "<config>");

/// Canonical text of a configuration. Parsing it yields the same
/// configuration and therefore the same text. Thread count is omitted: it
/// never changes results.
std::string to_config_text(ExperimentConfig const& config);

/// Keys accepted by the parser.
std::vector<std::string> const& known_config_keys();

/// Shortest decimal form that reads back as the same double.
std::string format_number(double x);

}  // namespace ccnet
