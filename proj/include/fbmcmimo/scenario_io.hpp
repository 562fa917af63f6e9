// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "fbmcmimo/experiments.hpp"

namespace fbmcmimo {

// INI-style scenario files. Sections: [fbmc], [channel], [array], [run],
// [contamination], [blind]. Parsing is strict: unknown sections or keys are
// rejected with the offending line number, and semantic errors name
// section.key. Defaults are documented in the schema (see README) and echoed
// into the canonical form and report metadata.
Scenario parse_scenario_text(const std::string& text);
Scenario parse_scenario(const std::filesystem::path& path);

// Fully-defaulted canonical rendering; parsing it yields an equal Scenario.
std::string canonical_scenario_text(const Scenario& scenario);

}  // namespace fbmcmimo
