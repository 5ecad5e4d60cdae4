#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace nlfb {

using json = nlohmann::json;

/// One checked property with the numbers it was judged on.
struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  json measured = json::object();
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 7;
  /// Directory holding the bundled scenario files.
  std::filesystem::path scenario_dir;
  /// Called as each check finishes (progress output).
  std::function<void(const CheckResult&)> on_result;
};

/// Default location of the bundled scenarios (compiled in; overridable by NLFB_SCENARIO_DIR).
std::filesystem::path default_scenario_dir();

/// Suite names: kernels, reactions, quadrature, dichotomy, speeds, limits,
/// accelerated, hygiene, and acceptance (all numbered criteria in order).
const std::vector<std::string>& suite_names();

/// Error{InvalidArgument} for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts);

/// The numbered acceptance criteria, 1..11.
CheckResult acceptance_criterion(int number, const VerifyOptions& opts);

/// "PASS|FAIL <id> <name>: <measured>" on one line.
std::string format_line(const CheckResult& r);
json to_json(const std::vector<CheckResult>& results);

}  // namespace nlfb
