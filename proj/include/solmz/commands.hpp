#pragma once

// Scenario-driven entry points behind the command-line tool. Each command
// parses and validates its whole scenario before any compute.

#include "solmz/feshbach.hpp"
#include "solmz/gpe.hpp"
#include "solmz/scenario.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace solmz {

struct RunContext {
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    unsigned workers = 1;
};

struct CommandResult {
    std::string report;                 // key = value lines
    std::vector<std::string> files;     // written paths
    std::vector<std::string> warnings;
};

const std::vector<std::string>& command_names();
std::vector<KeySpec> command_schema(const std::string& command);
Scenario make_scenario(const std::string& command);

// Throws on the first invalid or inconsistent parameter.
void validate_command(const std::string& command, const Scenario& sc);

CommandResult run_command(const std::string& command, const Scenario& sc, const RunContext& ctx);

// Shared by the fieldmap command and tests: frequencies of a known profile
// at the given positions, with Gaussian field noise of std noise_T.
std::vector<RfSample> synthetic_rf_samples(const FieldProfile& profile, double g_F, int dmF,
                                           std::span<const double> positions, double noise_T,
                                           std::mt19937_64& rng);

// Initial state described by the [prep] block of a scenario.
struct PreparedCloud {
    Grid1D grid;
    GuidedAtoms atoms;
    WaveState state;
    AxialPotential guide;
    double dt = 1e-6;
};
PreparedCloud prepare_cloud(const Scenario& sc);

} // namespace solmz
