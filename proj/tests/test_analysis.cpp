#include <cmath>

#include "doctest.h"
#include "nlfb/analysis.hpp"
#include "nlfb/errors.hpp"

using namespace nlfb;

namespace {

std::vector<double> times(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * i / (n - 1);
  return t;
}

FrontSeries series(const std::vector<double>& t, double scale, double dx = 0.1) {
  FrontSeries s;
  for (double v : t) s.samples.push_back({v, -scale * v, scale * v, 0.0, 0.0});
  Snapshot snap;
  snap.t = t.back();
  snap.u.dx = dx;
  snap.u.first_index = 0;
  snap.u.values = {{scale, scale}};
  s.snapshots.push_back(snap);
  return s;
}

}  // namespace

TEST_CASE("exact recovery on synthetic growth") {
  const auto t = times(2.0, 100.0, 200);
  std::vector<double> lin, tlt, pw;
  for (double v : t) {
    lin.push_back(2.0 * v + 1.0);
    tlt.push_back(3.0 * v * std::log(v) + 0.5);
    pw.push_back(0.5 * std::pow(v, 1.7));
  }
  const FitReport a = fit_growth(t, lin, GrowthLaw::Linear);
  CHECK(a.coefficient == doctest::Approx(2.0));
  CHECK(a.intercept == doctest::Approx(1.0));
  CHECK(a.r_squared == doctest::Approx(1.0));
  CHECK(a.t_start == doctest::Approx(50.0).epsilon(0.02));
  const FitReport b = fit_growth(t, tlt, GrowthLaw::TLogT);
  CHECK(b.coefficient == doctest::Approx(3.0));
  const FitReport c = fit_growth(t, pw, GrowthLaw::Power, Window{10.0, 100.0});
  CHECK(*c.exponent == doctest::Approx(1.7));
  CHECK(c.coefficient == doctest::Approx(0.5));

  CHECK(best_growth_law(t, lin).model == GrowthLaw::Linear);
  CHECK(best_growth_law(t, tlt, Window{10.0, 100.0}).model == GrowthLaw::TLogT);
  CHECK(best_growth_law(t, pw).model == GrowthLaw::Power);
}

TEST_CASE("noisy linear data is not mistaken for acceleration") {
  const auto t = times(1.0, 200.0, 400);
  std::vector<double> y;
  for (size_t i = 0; i < t.size(); ++i) y.push_back(0.3 * t[i] + 0.01 * std::sin(7.0 * i));
  const LawSelection s = best_growth_law(t, y);
  CHECK(s.all.size() == 3);
  CHECK(s.model == GrowthLaw::Linear);
}

TEST_CASE("too few samples") {
  const auto t = times(1.0, 10.0, 10);
  std::vector<double> y(t.begin(), t.end());
  try {
    fit_growth(t, y, GrowthLaw::Linear);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InsufficientData);
  }
}

TEST_CASE("growth law names") {
  CHECK(growth_law_from_string("tlogt") == GrowthLaw::TLogT);
  CHECK(to_string(GrowthLaw::Power) == "power");
  CHECK_THROWS_AS(growth_law_from_string("quadratic"), Error);
}

TEST_CASE("ordering checks") {
  const auto t = times(0.0, 10.0, 50);
  CHECK(compare_orderings(series(t, 1.0), series(t, 2.0)).ordered);
  const OrderReport r = compare_orderings(series(t, 2.0), series(t, 1.0));
  CHECK_FALSE(r.ordered);
  try {
    compare_orderings(series(t, 1.0, 0.1), series(t, 1.0, 0.2));
    FAIL("expected GridMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::GridMismatch);
  }
}
