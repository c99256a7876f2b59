#pragma once

#include <string>

#include "fusedleo/app.hpp"

namespace fusedleo::testing {

inline std::string source_path(const std::string& rel) { return std::string(FUSEDLEO_SOURCE_DIR) + "/" + rel; }

inline Scenario desk_scenario() { return load_scenario(source_path("scenarios/desk.scenario")); }
inline Scenario full_scenario() { return load_scenario(source_path("scenarios/paper.scenario")); }

}  // namespace fusedleo::testing
