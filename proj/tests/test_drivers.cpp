#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "drivers.hpp"
#include "nlfb/verify.hpp"

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
  const fs::path dir = fs::temp_directory_path() / "nlfb_test_drivers" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& stem, const json& doc) {
  const fs::path p = dir / (stem + ".json");
  std::ofstream(p) << doc.dump(2);
  return p;
}

json small_fb(double mu) {
  return json{{"model", "wnv"},
              {"kernels", {{"family", "laplace"}, {"scale", 1}}},
              {"mu", {mu, mu}},
              {"h0", 5},
              {"numerics", {{"dx", 0.1}, {"dt", 0.05}, {"t_end", 10}}}};
}

}  // namespace

TEST_CASE("free-boundary driver writes its artifacts") {
  const fs::path dir = scratch("fb");
  std::ostringstream log;
  const auto cfg = write_config(dir, "run", small_fb(1.0));
  REQUIRE(cli::run_config(cfg, Driver::FreeBoundary, dir / "out", 7, log) == cli::Ok);
  for (const char* f : {"fronts.csv", "snapshots.csv", "summary.json"}) CHECK(fs::exists(dir / "out" / f));
  const json s = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(s["name"] == "run");
  CHECK(s["config"]["numerics"]["dt"] == 0.05);
  CHECK(s.contains("thresholds_used"));
  CHECK(s["final_h"].get<double>() > 5.0);

  // fitting the fronts of the run
  FitConfig fc;
  fc.law = "linear";
  REQUIRE(cli::fit(dir / "out" / "fronts.csv", fc, dir / "fit", log) == cli::Ok);
  const json fits = json::parse(slurp(dir / "fit" / "fits.json"));
  CHECK(fits["fits"].size() == 2);
  CHECK(fits["fits"][0]["model"] == "linear");
}

TEST_CASE("invalid configs exit with code 2 and the field pointer") {
  std::ostringstream log;
  const fs::path bad = default_scenario_dir() / "invalid" / "unknown_key.json";
  CHECK(cli::run_config(bad, Driver::FreeBoundary, scratch("bad"), 7, log) == cli::BadConfig);
  CHECK(log.str().find("/numerics/dtt") != std::string::npos);
}

TEST_CASE("cauchy driver writes level sets") {
  const fs::path dir = scratch("cauchy");
  std::ostringstream log;
  json doc{{"model", "wnv"},
           {"kernels", {{"family", "laplace"}, {"scale", 1}}},
           {"h0", 5},
           {"levels", {{{"component", 1}, {"fraction", 0.5}}}},
           {"numerics", {{"t_end", 10}}}};
  const auto cfg = write_config(dir, "c", doc);
  REQUIRE(cli::run_config(cfg, Driver::Cauchy, dir / "out", 7, log) == cli::Ok);
  const std::string lv = slurp(dir / "out" / "levels.csv");
  CHECK(lv.rfind("t,i,lambda,x_minus,x_plus\n", 0) == 0);
  const json s = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(s["config"]["numerics"]["max_half_width"] == "infinite");
  FitConfig fc;
  REQUIRE(cli::fit(dir / "out" / "levels.csv", fc, dir / "fit", log) == cli::Ok);
}

TEST_CASE("speeds driver reports infinite speeds for heavy tails") {
  const fs::path dir = scratch("speeds");
  std::ostringstream log;
  const int code =
      cli::run_config(default_scenario_dir() / "speeds_powerlaw.json", Driver::Speeds, dir, 7, log);
  CHECK(code == cli::Ok);
  const json s = json::parse(slurp(dir / "speeds.json"));
  CHECK(s["c0"] == "infinite");
  CHECK(s["cstar"] == "infinite");
}

TEST_CASE("concurrent sweep matches serial runs byte for byte") {
  const fs::path dir = scratch("sweep");
  std::vector<fs::path> cfgs{write_config(dir, "a", small_fb(1.0)), write_config(dir, "b", small_fb(2.0)),
                             write_config(dir, "c", small_fb(4.0))};
  std::ostringstream log;
  REQUIRE(cli::sweep(cfgs, Driver::FreeBoundary, dir / "par", 3, 7, log) == cli::Ok);
  REQUIRE(cli::sweep(cfgs, Driver::FreeBoundary, dir / "ser", 1, 7, log) == cli::Ok);
  for (const char* stem : {"a", "b", "c"})
    for (const char* f : {"fronts.csv", "snapshots.csv", "summary.json"}) {
      CAPTURE(stem);
      CHECK(slurp(dir / "par" / stem / f) == slurp(dir / "ser" / stem / f));
    }
}

TEST_CASE("verify rejects unknown suites") { CHECK_THROWS(run_suite("everything", {})); }
