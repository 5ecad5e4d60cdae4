#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "nlfb/io.hpp"

using namespace nlfb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nlfb_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("doubles round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) CHECK(std::stod(format_double(v)) == v);
  CHECK(json_number(kInfinite) == "infinite");
  CHECK(json_number(2.5) == 2.5);
}

TEST_CASE("csv writers are deterministic and shaped as documented") {
  FrontSeries s;
  for (int i = 0; i < 5; ++i) s.samples.push_back({0.1 * i, -1.0 - i, 1.0 + i, 0, 0});
  write_fronts_csv(scratch("a/fronts.csv"), s);
  write_fronts_csv(scratch("b/fronts.csv"), s);
  const std::string a = slurp(scratch("a/fronts.csv"));
  CHECK(a == slurp(scratch("b/fronts.csv")));
  CHECK(a.rfind("t,g,h\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 6);

  std::vector<LevelSample> levels{{1.0, 0, 0.25, -2.0, 2.0}, {2.0, 1, 0.25, std::nullopt, std::nullopt}};
  write_levels_csv(scratch("levels.csv"), levels);
  const std::string l = slurp(scratch("levels.csv"));
  CHECK(l.rfind("t,i,lambda,x_minus,x_plus\n", 0) == 0);
  CHECK(l.find("2,2,0.25,,\n") != std::string::npos);

  Snapshot snap{1.0, GridFunction{0.5, -1, {{0.1, 0.2, 0.3}, {0.0, 0.5, 0.0}}, std::nullopt}};
  write_snapshots_csv(scratch("snap.csv"), {snap}, 2);
  const std::string sn = slurp(scratch("snap.csv"));
  CHECK(sn.rfind("t,x,u1,u2\n", 0) == 0);
  CHECK(sn.find("1,-0.5,0.10000000000000001,0\n") != std::string::npos);
}

TEST_CASE("fit reports serialize") {
  FitReport f;
  f.model = GrowthLaw::Power;
  f.coefficient = 2.0;
  f.exponent = 1.5;
  f.r_squared = 0.99;
  f.t_start = 5;
  f.t_end = 10;
  const json j = to_json(f);
  CHECK(j["model"] == "power");
  CHECK(j["params"]["exponent"] == 1.5);
  CHECK(j["window"][1] == 10.0);
  CHECK(to_json(OutcomeThresholds{})["growth_factor"] == 10.0);
}
