#pragma once

#include "dmtlink/sweep.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace dmtlink {

// JSON experiment configuration with top-level sections
// {dmt, vcsel, filter, fiber, rx, sweep}. Absent keys keep their defaults;
// unknown keys and invariant violations raise ConfigError naming the key path.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Fully populated configuration as JSON (accepted back by parse_config).
std::string dump_config(const ExperimentConfig& cfg);

} // namespace dmtlink
