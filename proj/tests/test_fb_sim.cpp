#include <cmath>

#include "doctest.h"
#include "nlfb/analysis.hpp"
#include "nlfb/errors.hpp"
#include "nlfb/fb_sim.hpp"
#include "oracles.hpp"

using namespace nlfb;

namespace {

FBConfig base(double mu = 1.0, double h0 = 5.0, double t_end = 10.0) {
  const Kernel k = make_kernel(LaplaceSpec{1.0});
  FBConfig cfg{make_wnv({}), {k, k}, {mu, mu}, h0};
  cfg.dx = 0.1;
  cfg.dt = 0.05;
  cfg.t_end = t_end;
  cfg.snapshot_times = {t_end};
  return cfg;
}

double at(const GridFunction& u, int c, std::int64_t k) {
  return (k >= u.first_index && k <= u.last_index()) ? u.values[c][k - u.first_index] : 0.0;
}

}  // namespace

TEST_CASE("front speed equals mu times the quadrature flux") {
  // forward Euler moves h by dt * mu * int_g^h tail(h - x) u1(x) dx (summed over components)
  FBConfig cfg = base(0.7, 3.0);
  FBSimulator sim(cfg);
  FBState s = sim.initial_state();
  for (int n = 0; n < 40; ++n) sim.step(s, cfg.dt);
  const Kernel& k = cfg.kernels[0];
  const GridFunction& u = s.u;
  double flux = 0.0;
  for (int c = 0; c < 2; ++c) {
    auto interp = [&](double y) {
      const double xl = u.x(0), xr = u.x(u.size() - 1);
      if (y <= s.g || y >= s.h) return 0.0;
      if (y < xl) return u.values[c].front() * (y - s.g) / (xl - s.g);
      if (y > xr) return u.values[c].back() * (s.h - y) / (s.h - xr);
      const auto n = static_cast<size_t>(std::min<double>(std::floor((y - xl) / u.dx), u.size() - 2));
      const double t = (y - xl) / u.dx - n;
      return u.values[c][n] * (1 - t) + u.values[c][n + 1] * t;
    };
    std::vector<double> cuts{s.g, s.h};
    for (size_t n = 0; n < u.size(); ++n) cuts.push_back(u.x(n));
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      flux += oracle::simpson([&](double y) { return k.tail_mass(s.h - y) * interp(y); }, cuts[i], cuts[i + 1], 1e-13);
  }
  const double h_before = s.h;
  sim.step(s, cfg.dt);
  // the simulator's flux is a trapezoid sum, second order in dx
  CHECK((s.h - h_before) / cfg.dt == doctest::Approx(cfg.mu[0] * flux).epsilon(2e-3));
}

TEST_CASE("symmetric data stays symmetric") {
  const FrontSeries s = run(base());
  for (const auto& p : s.samples) CHECK(std::abs(p.g + p.h) <= 1e-12);
  const GridFunction& u = s.snapshots.back().u;
  for (std::int64_t k = 0; k <= u.last_index(); ++k)
    for (int c = 0; c < 2; ++c) CHECK(std::abs(at(u, c, k) - at(u, c, -k)) <= 1e-12);
}

TEST_CASE("fronts are monotone and solutions stay in the invariant box") {
  FBConfig cfg = base(1.0, 5.0, 20.0);
  cfg.snapshot_times = {5, 10, 15, 20};
  const FrontSeries s = run(cfg);
  for (size_t n = 1; n < s.samples.size(); ++n) {
    CHECK(s.samples[n].h >= s.samples[n - 1].h);
    CHECK(s.samples[n].g <= s.samples[n - 1].g);
  }
  REQUIRE(s.snapshots.size() == 4);
  for (size_t n = 0; n < 4; ++n) {
    CHECK(s.snapshots[n].t == cfg.snapshot_times[n]);
    for (const auto& comp : s.snapshots[n].u.values)
      for (double v : comp) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
  }
}

TEST_CASE("comparison: larger data and larger mu give larger solutions") {
  FBConfig a = base(1.0, 5.0, 15.0), b = base(1.0, 5.0, 15.0);
  a.amplitude = {0.125, 0.125};
  b.amplitude = {0.25, 0.25};
  CHECK(compare_orderings(run(a), run(b)).ordered);
  CHECK(compare_orderings(run(base(1.0, 5.0, 15.0)), run(base(4.0, 5.0, 15.0))).ordered);
  // reversed order is detected
  const OrderReport rev = compare_orderings(run(b), run(a));
  CHECK_FALSE(rev.ordered);
  CHECK(rev.first_violation);
}

TEST_CASE("Euler and Heun agree to first order") {
  FBConfig e = base(1.0, 5.0, 10.0), h = e;
  h.heun = true;
  const double he = run(e).samples.back().h, hh = run(h).samples.back().h;
  CHECK(std::abs(he - hh) / hh < 0.01);
}

TEST_CASE("mesh halving changes the front by little") {
  FBConfig c = base(1.0, 5.0, 20.0), f = c;
  f.dx = 0.05;
  f.dt = 0.025;
  const double hc = run(c).samples.back().h, hf = run(f).samples.back().h;
  CHECK(std::abs(hc - hf) / hf < 0.05);
}

TEST_CASE("dichotomy on short horizons") {
  FBConfig spread = base(1.0, 10.0, 60.0);
  spread.thresholds.growth_factor = 1.0;  // short horizon
  CHECK(classify_outcome(run(spread), spread) == Outcome::Spreading);
  FBConfig vanish = base(0.01, 0.1, 40.0);
  vanish.dx = 0.02;
  CHECK(classify_outcome(run(vanish), vanish) == Outcome::Vanishing);
}

TEST_CASE("stability bound") {
  const ReactionModel m = make_wnv({});
  CHECK(stability_bound(m) == doctest::Approx(0.5 / (1.0 + lipschitz_bound(m))));
  FBSimulator sim(base());
  CHECK(sim.stability_bound() == doctest::Approx(stability_bound(m)));
}

TEST_CASE("an oversized step is caught as an instability") {
  FBConfig cfg = base(1.0, 5.0, 50.0);
  cfg.dt = 3.0;
  CHECK_THROWS_AS(run(cfg), InstabilityError);
}

TEST_CASE("configuration errors") {
  FBConfig cfg = base();
  cfg.mu = {0.0, 0.0};
  CHECK_THROWS_AS(FBSimulator{cfg}, Error);
  cfg = base();
  cfg.kernels.pop_back();
  CHECK_THROWS_AS(FBSimulator{cfg}, Error);
  cfg = base();
  cfg.h0 = 0.0;
  CHECK_THROWS_AS(FBSimulator{cfg}, Error);
  cfg = base();
  cfg.amplitude = {2.0, 0.1};
  CHECK_THROWS_AS(FBSimulator(cfg).initial_state(), Error);
}

TEST_CASE("parallel and serial convolution give identical runs") {
  FBConfig a = base(1.0, 5.0, 5.0), b = a;
  a.conv_path = ConvPath::Serial;
  b.conv_path = ConvPath::Direct;
  const FrontSeries sa = run(a), sb = run(b);
  CHECK(std::abs(sa.samples.back().h - sb.samples.back().h) < 1e-12);
}
