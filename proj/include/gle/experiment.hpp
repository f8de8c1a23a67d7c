#pragma once

#include <string>

#include "gle/config.hpp"

namespace gle {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonFinite = 3;

// Runs one subcommand (kernel-info, sample-noise, simulate, msd,
// stationarity, coupling, novikov, lyapunov) and writes its declared output
// files under the config's `out` prefix.  Returns a process exit code; every
// report embeds the config hash and seed.
int run_experiment(const ExperimentConfig& config, const std::string& subcommand);

// Locale-independent shortest round-trip formatting used for all numeric
// output.
std::string format_double(double value);

}  // namespace gle
