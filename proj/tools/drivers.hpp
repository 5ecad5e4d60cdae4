#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nlfb/scenario.hpp"

namespace nlfb::cli {

namespace fs = std::filesystem;

/// Process exit codes.
enum Exit : int { Ok = 0, ChecksFailed = 1, BadConfig = 2, NumericalFailure = 3 };

/// fronts.csv, snapshots.csv, summary.json.
int simulate_fb(const Scenario& sc, const fs::path& out, std::uint64_t seed, std::ostream& log);
/// levels.csv, snapshots.csv, summary.json.
int simulate_cauchy(const Scenario& sc, const fs::path& out, std::uint64_t seed, std::ostream& log);
/// speeds.json and semiwave.csv (profile at c0).
int speeds(const Scenario& sc, const fs::path& out, std::ostream& log);

/// Fits every trajectory of a fronts.csv (h and -g) or levels.csv (x_plus and
/// -x_minus per level) and writes fits.json.
int fit(const fs::path& input, const FitConfig& cfg, const fs::path& out, std::ostream& log);

int verify(const std::string& suite, std::uint64_t seed, const std::optional<fs::path>& out, std::ostream& log);

/// Runs the configs concurrently, at most `jobs` at a time, each into out/<stem>/.
int sweep(const std::vector<fs::path>& configs, Driver driver, const fs::path& out, int jobs, std::uint64_t seed,
          std::ostream& log);

/// Loads and dispatches one config; converts errors into exit codes and messages on `log`.
int run_config(const fs::path& config, Driver driver, const fs::path& out, std::uint64_t seed, std::ostream& log);

}  // namespace nlfb::cli
