#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "core/harness.hpp"

// Scenario files: JSON in, with powers in dBm and SINR targets in dB.
// This module is the only place where dB/dBm conversions happen on the
// way in; everything behind it works in linear Watts. Saving re-emits
// the dB-domain values, so load -> save -> load is stable.

namespace swiptsec {

struct SolverSettings {
    double tol = 1e-8;
    int max_iter = 200;
};

struct OutputSettings {
    std::string directory = ".";
    std::vector<std::string> formats = {"json", "csv"};
};

struct Scenario {
    SystemConfig system;
    FadingSpec fading;
    SolverSettings solver;
    OutputSettings output;
    std::optional<SweepSpec> sweep;  // base_config/base_fading filled from above
    nlohmann::json normalized;       // dB-domain view with defaults resolved
};

// Throws std::invalid_argument with a field path on malformed input.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario scenario_from_string(const std::string& text);
Scenario scenario_load(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& s);

// The simulation-defaults scenario.
nlohmann::json default_scenario_json();

// Report serialization for the CLI and the C API.
nlohmann::json policy_to_json(const TransmitPolicy& policy);
TransmitPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json solve_report_to_json(const SolveReport& report, const std::string& scheme,
                                    std::uint64_t seed);
nlohmann::json constraint_report_to_json(const ConstraintReport& report);

}  // namespace swiptsec
