#pragma once

#include <string>
#include <vector>

#include "evodyn/cli/config.hpp"

namespace evodyn::cli {

// Ids in the registry, in display order.
const std::vector<std::string>& preset_ids();

// The scenario set for a figure id. Unknown ids throw ConfigError listing
// the available ones.
ConfigDocument figure(const std::string& id);

}  // namespace evodyn::cli
