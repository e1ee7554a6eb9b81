#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aigcfl/population.hpp"

namespace aigcfl {

// Inputs for the synthetic quadratic federation subcommand.
struct FlsimSpec {
    int dimension = 2;
    std::vector<double> lambdas;
    std::vector<long long> datasizes;
    int rounds = 50;
};

struct LoadedConfig {
    ScenarioConfig scenario;
    std::optional<FlsimSpec> flsim;
};

// Parses a scenario JSON document with top-level sections population, quality,
// learning, server and experiment.  Reports every violation it can find in one
// ConfigError.  Keys starting with '_' are ignored metadata.
LoadedConfig parse_scenario(const std::string& text, const std::string& origin);

// Reads and parses the file at path.
LoadedConfig load_scenario(const std::string& path);

}  // namespace aigcfl
