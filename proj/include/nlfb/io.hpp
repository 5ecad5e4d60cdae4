#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlfb/analysis.hpp"
#include "nlfb/cauchy_sim.hpp"
#include "nlfb/fb_sim.hpp"
#include "nlfb/semiwave.hpp"

namespace nlfb {

using json = nlohmann::json;

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double v);

/// Numbers as JSON, with infinities spelled "infinite" (JSON has no inf).
json json_number(double v);

/// fronts.csv: t,g,h
void write_fronts_csv(const std::filesystem::path& path, const FrontSeries& series);
/// snapshots.csv: t,x,u1,...,um (one row per node per snapshot)
void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots, int m);
/// levels.csv: t,i,lambda,x_minus,x_plus (empty fields where the level is absent; i is 1-based)
void write_levels_csv(const std::filesystem::path& path, const std::vector<LevelSample>& levels);
/// semiwave.csv: `# c=..., L=..., residual=...` then x,phi_1,...,phi_m
void write_semiwave_csv(const std::filesystem::path& path, const SemiWaveSolution& sol);

void write_json(const std::filesystem::path& path, const json& doc);

json to_json(const OutcomeThresholds& th);
/// {model, params, r_squared, window} plus residual diagnostics.
json to_json(const FitReport& fit);

}  // namespace nlfb
