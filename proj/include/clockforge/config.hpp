// Scenario configuration: a flat, sectioned key = value text format.
//
//   # comment
//   [params]            mu1 mu2 mu3 sigma1 sigma2 sigma3 [sigma1p sigma2p sigma3p]
//   [init]              c1 c2 c3
//   [grid]              tau, and one of n_steps / horizon
//   [run]               n_paths seed outputs t level taus
//   [jump]              component amplitude theta         (repeatable)
//   [paired_jump]       a theta0 theta1                   (repeatable)
//   [variance_window]   theta0 theta1                     (repeatable)
//
// Every epoch is in seconds. See docs/config.md for the full schema.
#pragma once

#include "clockforge/model.hpp"
#include "clockforge/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace clockforge {

struct ScenarioConfig {
    ClockParameters params;
    InitialState init;
    SimulationGrid grid;
    AnomalySchedule schedule;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs; ///< subset of {paths, moments, density}
    std::vector<double> predict_epochs;
    double level = 0.95;
    std::vector<double> allan_taus;

    [[nodiscard]] bool wants(std::string_view output) const;
};

/// Parses config text. Throws ConfigError carrying the offending line number.
[[nodiscard]] ScenarioConfig parse_config(std::string_view text);

/// Reads and parses a config file. Throws ConfigError if unreadable or malformed.
[[nodiscard]] ScenarioConfig load_config(const std::filesystem::path &path);

/// Checks the scenario against its grid (sigmas, burst/window pairing, epoch
/// alignment, n_paths). Throws ScheduleError / MisalignedEpochError / DomainError.
void validate_config(const ScenarioConfig &config);

/// Comma-separated list of reals, e.g. "1000, 3000,6000". Throws ConfigError.
[[nodiscard]] std::vector<double> parse_real_list(std::string_view text, int line = 0);

} // namespace clockforge
