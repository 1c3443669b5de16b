#pragma once

#include <string>
#include <string_view>

#include "bpv/agents.hpp"

namespace bpv {

// Parses the human-editable scenario format: `[section]` headers with
// `key = value` lines and `#` comments. Sections: election, variants,
// stuffing, voters, proxies, run. ConfigError on malformed input; the parsed
// config is additionally validated.
ScenarioConfig parse_scenario_config(std::string_view text);

// Error when the file cannot be read; otherwise as parse_scenario_config.
ScenarioConfig load_scenario_file(const std::string& path);

}  // namespace bpv
