// Command-line front end: simulate, predict, allan.
#pragma once

#include "clockforge/analysis.hpp"
#include "clockforge/config.hpp"

#include <filesystem>
#include <ostream>
#include <span>
#include <vector>

namespace clockforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;   ///< bad flags, malformed config, I/O failure
inline constexpr int kExitNumeric = 2; ///< schedule or numerical error

/// Thread cap from CLOCKFORGE_THREADS (unset or 0 = auto). Throws ConfigError
/// when the variable is not a non-negative integer.
[[nodiscard]] unsigned thread_cap_from_env();

/// Writes path_<id>.csv per path and, for more than one path,
/// ensemble_moments.csv with analytic against empirical moments per epoch.
void run_simulate(const ScenarioConfig &config, const std::filesystem::path &out_dir,
                  unsigned threads, std::ostream &log);

/// Writes prediction.csv (and density.csv when requested) for each epoch.
std::vector<PredictionReport> run_predict(const ScenarioConfig &config,
                                          std::span<const double> epochs, double level,
                                          bool density, const std::filesystem::path &out_dir,
                                          std::ostream &log);

/// Simulates path 0 of the scenario and writes allan.csv.
AllanEstimate run_allan(const ScenarioConfig &config, std::span<const double> taus,
                        const std::filesystem::path &out_dir, std::ostream &log);

/// Full command line (argv[0] included). Returns the process exit code.
[[nodiscard]] int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace clockforge::cli
