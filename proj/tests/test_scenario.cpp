#include <filesystem>

#include "doctest.h"
#include "nlfb/errors.hpp"
#include "nlfb/scenario.hpp"
#include "nlfb/verify.hpp"

using namespace nlfb;
namespace fs = std::filesystem;

namespace {

std::string pointer_of(const fs::path& file, Driver d) {
  try {
    load_scenario(file, d);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

std::string pointer_of(const json& doc, Driver d) {
  try {
    parse_scenario(doc, d);
  } catch (const ConfigError& e) {
    return e.pointer();
  }
  return "<accepted>";
}

json minimal() {
  return json{{"model", "wnv"}, {"kernels", {{"family", "laplace"}, {"scale", 1}}}, {"mu", {1, 1}}, {"h0", 5}};
}

}  // namespace

TEST_CASE("bundled scenarios load with their drivers") {
  const fs::path dir = default_scenario_dir();
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".json" || e.path().filename() == "schema.json") continue;
    const std::string stem = e.path().stem().string();
    const Driver d = stem.rfind("cauchy", 0) == 0   ? Driver::Cauchy
                     : stem.rfind("speeds", 0) == 0 ? Driver::Speeds
                                                    : Driver::FreeBoundary;
    CAPTURE(stem);
    const Scenario sc = load_scenario(e.path(), d);
    CHECK(sc.name == stem);
    ++n;
  }
  CHECK(n >= 6);
}

TEST_CASE("invalid fixtures name the offending field") {
  const fs::path dir = default_scenario_dir() / "invalid";
  const std::vector<std::tuple<std::string, Driver, std::string>> cases{
      {"m0_exceeds_m", Driver::FreeBoundary, "/m0"},
      {"powerlaw_gamma_le_1", Driver::FreeBoundary, "/kernels/gamma"},
      {"unknown_key", Driver::FreeBoundary, "/numerics/dtt"},
      {"unstable_dt", Driver::FreeBoundary, "/numerics/dt"},
      {"bad_expression", Driver::FreeBoundary, "/f/0"},
      {"mu_zero", Driver::FreeBoundary, "/mu"},
      {"kernel_count", Driver::FreeBoundary, "/kernels"},
      {"lambda_out_of_range", Driver::Cauchy, "/levels/0/lambda"},
      {"coarse_dx", Driver::FreeBoundary, "/numerics/dx"},
      {"no_equilibrium", Driver::FreeBoundary, "/params"}};
  for (const auto& [file, driver, ptr] : cases) {
    CAPTURE(file);
    CHECK(pointer_of(dir / (file + ".json"), driver) == ptr);
  }
}

TEST_CASE("m0 above m is reported with its bound") {
  try {
    load_scenario(default_scenario_dir() / "invalid" / "m0_exceeds_m.json", Driver::FreeBoundary);
    FAIL("accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("m0 must satisfy 1 <= m0 <= m = 1") != std::string::npos);
  }
}

TEST_CASE("defaults are resolved and recorded") {
  const Scenario sc = parse_scenario(minimal(), Driver::FreeBoundary);
  REQUIRE(sc.fb);
  CHECK(sc.fb->kernels.size() == 2);
  CHECK(sc.fb->dx == 0.1);
  CHECK(sc.fb->dt <= stability_bound(sc.fb->model));
  CHECK(sc.resolved["numerics"]["dx"] == 0.1);
  CHECK(sc.resolved["numerics"].contains("dt"));
  CHECK(sc.resolved["numerics"]["snapshot_times"] == json::array({10.0}));
}

TEST_CASE("field-level errors") {
  json d = minimal();
  d["numerics"] = {{"snapshot_times", {20}}, {"t_end", 10}};
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/numerics/snapshot_times/0");
  d = minimal();
  d["h0"] = -1;
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/h0");
  d = minimal();
  d["params"] = {{"a9", 1}};
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/params/a9");
  d = minimal();
  d["kernels"] = {{"family", "cauchy"}};
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/kernels/family");
  d = minimal();
  d["initial"] = {{"amplitude", {2, 0.5}}};
  CHECK(pointer_of(d, Driver::FreeBoundary).rfind("/initial/amplitude", 0) == 0);
  d = minimal();
  d["fit"] = {{"law", "cubic"}};
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/fit/law");
  d = minimal();
  d["numerics"] = {{"L_schedule", {100, 50}}};
  CHECK(pointer_of(d, Driver::Speeds) == "/numerics/L_schedule");
  d = minimal();
  d["levels"] = {{{"component", 3}, {"fraction", 0.5}}};
  CHECK(pointer_of(d, Driver::Cauchy) == "/levels/0/component");
}

TEST_CASE("custom models with non-diffusing components") {
  json d{{"model", "custom"},
         {"m", 2},
         {"m0", 1},
         {"f", {"-u1 + 2 * u2 / (1 + u2)", "-u2 + 2 * u1 / (1 + u1)"}},
         {"kernels", {{"family", "gaussian"}, {"sigma", 1}}},
         {"mu", {1}},
         {"h0", 3}};
  const Scenario sc = parse_scenario(d, Driver::FreeBoundary);
  CHECK(sc.fb->model.m0() == 1);
  CHECK(sc.fb->model.diffusion() == std::vector<double>{1.0, 0.0});
  d["diffusion"] = {1, 0.5};
  CHECK(pointer_of(d, Driver::FreeBoundary) == "/diffusion/1");
}
