#include <cmath>

#include "doctest.h"
#include "nlfb/cauchy_sim.hpp"
#include "nlfb/errors.hpp"
#include "nlfb/fb_sim.hpp"

using namespace nlfb;

namespace {

CauchyConfig base(double t_end = 10.0) {
  const Kernel k = make_kernel(LaplaceSpec{1.0});
  CauchyConfig cfg{make_wnv({}), {k, k}, 5.0};
  cfg.dx = 0.1;
  cfg.dt = 0.05;
  cfg.t_end = t_end;
  cfg.snapshot_times = {t_end};
  cfg.levels = {{0, 0.25}};
  return cfg;
}

double at(const GridFunction& u, int c, std::int64_t k) {
  return (k >= u.first_index && k <= u.last_index()) ? u.values[c][k - u.first_index] : 0.0;
}

}  // namespace

TEST_CASE("level set of a linear profile") {
  GridFunction u{0.5, -4, {{0, 0.25, 0.5, 0.75, 1.0, 0.75, 0.5, 0.25, 0}}, std::nullopt};
  const auto ls = level_set(u, 0, 0.6, 1.5);
  REQUIRE(ls);
  CHECK(ls->first == doctest::Approx(-0.8));
  CHECK(ls->second == doctest::Approx(0.8));
  CHECK_FALSE(level_set(u, 0, 1.2, 1.5));
  CHECK_THROWS_AS(level_set(u, 0, 1.5, 1.5), Error);
  CHECK_THROWS_AS(level_set(u, 0, 0.0, 1.5), Error);
}

TEST_CASE("level sets spread symmetrically and monotonically") {
  const CauchySeries s = run(base(20.0));
  double prev = 0.0;
  size_t seen = 0;
  for (const auto& l : s.levels) {
    if (!l.x_plus) continue;
    ++seen;
    CHECK(*l.x_minus == doctest::Approx(-*l.x_plus).epsilon(1e-12));
    CHECK(*l.x_plus >= prev - 1e-12);
    prev = *l.x_plus;
  }
  CHECK(seen > 100);
  CHECK(prev > 10.0);
}

TEST_CASE("the window grows and keeps small edges") {
  const CauchySimulator probe(base());
  const CauchySeries s = run(base(20.0));
  CHECK(s.windows.back()[2] > s.windows.front()[2]);
  const GridFunction& u = s.snapshots.back().u;
  for (int c = 0; c < 2; ++c) {
    CHECK(u.values[c].front() < 1e3 * probe.eps_edge());
    CHECK(u.values[c].back() < 1e3 * probe.eps_edge());
  }
  // maximum over the run, set by the narrow early windows
  CHECK(s.max_leak < 1e-3);
  CHECK_FALSE(s.capped);
}

TEST_CASE("whole-line solution dominates the free-boundary one") {
  CauchyConfig cc = base(15.0);
  const CauchySeries cs = run(cc);
  const Kernel k = make_kernel(LaplaceSpec{1.0});
  FBConfig fc{make_wnv({}), {k, k}, {1.0, 1.0}, 5.0};
  fc.dx = cc.dx;
  fc.dt = cc.dt;
  fc.t_end = cc.t_end;
  fc.snapshot_times = cc.snapshot_times;
  const FrontSeries fs = run(fc);
  const GridFunction& a = fs.snapshots.back().u;
  const GridFunction& b = cs.snapshots.back().u;
  for (std::int64_t n = a.first_index; n <= a.last_index(); ++n)
    for (int c = 0; c < 2; ++c) CHECK(at(a, c, n) <= at(b, c, n) + 1e-12);
}

TEST_CASE("heavy tails hit the window cap and report it") {
  const Kernel k = make_kernel(PowerLawSpec{1.5, 1.0});
  CauchyConfig cfg{make_wnv({}), {k, k}, 5.0};
  cfg.dx = 0.25;
  cfg.dt = 0.05;
  cfg.t_end = 4.0;
  cfg.max_half_width = 200.0;
  const CauchySeries s = run(cfg);
  CHECK(s.capped);
  CHECK(s.windows.back()[2] <= 200.0 + cfg.dx);
  CHECK(s.max_leak > 0.0);
}

TEST_CASE("configuration errors") {
  CauchyConfig cfg = base();
  cfg.levels = {{0, 0.9}};
  CHECK_THROWS_AS(CauchySimulator{cfg}, Error);
  cfg = base();
  cfg.levels = {{2, 0.1}};
  CHECK_THROWS_AS(CauchySimulator{cfg}, Error);
}
