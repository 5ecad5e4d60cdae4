#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlfb/analysis.hpp"
#include "nlfb/cauchy_sim.hpp"
#include "nlfb/fb_sim.hpp"
#include "nlfb/semiwave.hpp"

namespace nlfb {

using json = nlohmann::json;

/// Settings of the `speeds` driver.
struct SpeedsConfig {
  ReactionModel model;
  std::vector<Kernel> kernels;
  std::vector<double> mu;
  /// Scalar multipliers applied to every mu_i; empty means a single run at mu.
  std::vector<double> mu_sweep;
  double L = 50.0;
  double tol_c = 1e-3;
  bool cstar = true;
  std::vector<double> L_schedule;
  std::vector<double> c_grid;
  SemiWaveOptions opts;
};

struct FitConfig {
  /// "auto" selects among the three laws.
  std::string law = "auto";
  std::optional<Window> window;
};

/// A parsed scenario file. Only the sections relevant to the requested driver
/// are built; `resolved` is the input with every default filled in.
struct Scenario {
  std::string name;
  json resolved;
  std::optional<FBConfig> fb;
  std::optional<CauchyConfig> cauchy;
  std::optional<SpeedsConfig> speeds;
  FitConfig fit;
};

enum class Driver { FreeBoundary, Cauchy, Speeds };

/// Reads a JSON file; ConfigError with pointer "" when it is unreadable or malformed.
json load_json(const std::filesystem::path& path);

/// Validates the document and builds the driver configuration. Every schema
/// violation is a ConfigError naming the offending field by JSON pointer.
Scenario parse_scenario(const json& doc, Driver driver);
Scenario load_scenario(const std::filesystem::path& path, Driver driver);

/// Building blocks, exposed for tests. `ptr` is the pointer of `j` in the document.
ReactionModel parse_model(const json& doc);
Kernel parse_kernel(const json& j, const std::string& ptr, double eps_tail);

}  // namespace nlfb
