#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nlfb/errors.hpp"
#include "nlfb/expr.hpp"
#include "nlfb/reactions.hpp"

using namespace nlfb;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::InvalidArgument;
}

double max_abs(const State& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("equilibria of the presets") {
  const State w = positive_equilibrium(make_wnv({}));
  CHECK(std::abs(w[0] - 0.5) < 1e-10);
  CHECK(std::abs(w[1] - 0.5) < 1e-10);
  const State c = positive_equilibrium(make_cholera({}));
  CHECK(std::abs(c[0] - 1.0 / 3.0) < 1e-10);
  CHECK(std::abs(c[1] - 1.0 / 3.0) < 1e-10);

  // random parameters above threshold: F(u*) = 0 with u* inside the box
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(0.5, 2.0);
  for (int n = 0; n < 20; ++n) {
    WnvParams p{uni(rng), uni(rng), 0.2 * uni(rng), 0.2 * uni(rng), uni(rng), uni(rng)};
    const ReactionModel m = make_wnv(p);
    const State u = positive_equilibrium(m);
    CHECK(max_abs(eval_F(m, u)) < 1e-12 * std::max(1.0, max_abs(u)));
    CHECK(u[0] > 0.0);
    CHECK(u[0] < p.e1);
  }
}

TEST_CASE("below threshold there is no positive root") {
  WnvParams p;
  p.b1 = p.b2 = 1.0;
  CHECK(code_of([&] { positive_equilibrium(make_wnv(p)); }) == Errc::NoPositiveRoot);
  CHECK_FALSE(make_wnv(p).u_star());
  CHECK_FALSE(make_wnv(p).equilibrium_failure().empty());
}

TEST_CASE("analytic Jacobians match finite differences") {
  for (const ReactionModel& m : {make_wnv({}), make_cholera({}), make_concave({})}) {
    for (const State& u : stratified_samples(m.sampling_box(), 50, 3)) {
      const Matrix a = jacobian(m, u);
      const Matrix fd = finite_difference_jacobian(m, u);
      for (size_t i = 0; i < a.a.size(); ++i) CHECK(a.a[i] == doctest::Approx(fd.a[i]).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("custom expressions reproduce a preset") {
  const ReactionModel wnv = make_wnv({});
  const ReactionModel custom =
      make_custom(2, 2, {"a1 * (e1 - u1) * u2 - b1 * u1", "a2 * (e2 - u2) * u1 - b2 * u2"},
                  {{"a1", 1}, {"a2", 1}, {"b1", 0.5}, {"b2", 0.5}, {"e1", 1}, {"e2", 1}}, {1, 1}, State{1, 1});
  for (const State& u : stratified_samples(wnv.sampling_box(), 40, 5)) {
    const State a = eval_F(wnv, u), b = eval_F(custom, u);
    CHECK(a[0] == doctest::Approx(b[0]).epsilon(1e-14));
    CHECK(a[1] == doctest::Approx(b[1]).epsilon(1e-14));
    const Matrix ja = jacobian(wnv, u), jb = jacobian(custom, u);
    for (size_t i = 0; i < ja.a.size(); ++i) CHECK(ja.a[i] == doctest::Approx(jb.a[i]).epsilon(1e-6).scale(1.0));
  }
  REQUIRE(custom.u_star());
  CHECK((*custom.u_star())[0] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("expression grammar") {
  const Expr e = Expr::compile("-2^2 + exp(0) * ln(u1) / k - (u2 - 1)", 2, {{"k", 2.0}});
  const std::vector<double> u{std::exp(4.0), 3.0};
  CHECK(e.eval(u) == doctest::Approx(-4.0 + 2.0 - 2.0));
  CHECK(Expr::compile("2^3^2", 0, {}).eval({}) == doctest::Approx(512.0));
  CHECK(code_of([] { Expr::compile("u1 * (1 - u1", 1, {}); }) == Errc::ParseError);
  CHECK(code_of([] { Expr::compile("u3", 2, {}); }) == Errc::ParseError);
  CHECK(code_of([] { Expr::compile("q * u1", 1, {}); }) == Errc::ParseError);
}

TEST_CASE("checked evaluation enforces the cone and ceiling") {
  const ReactionModel m = make_wnv({});
  CHECK(code_of([&] { eval_F(m, State{-0.1, 0.2}); }) == Errc::OutOfCone);
  CHECK(code_of([&] { eval_F(m, State{1.5, 0.2}); }) == Errc::AboveCeiling);
}

TEST_CASE("model construction validates its shape") {
  CHECK_THROWS_AS(make_custom(1, 2, {"u1"}, {}, {1.0}), Error);
  CHECK_THROWS_AS(make_custom(2, 1, {"u1", "u2"}, {}, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(make_custom(2, 2, {"u1"}, {}, {1.0, 1.0}), Error);
}

TEST_CASE("principal eigenvalue agrees with a dense eigensolver") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> off(0.0, 1.0), diag(-3.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    Matrix a(n);
    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) e(i, j) = a(i, j) = (i == j) ? diag(rng) : off(rng);
    const auto ev = e.eigenvalues();
    double best = -1e300;
    for (int i = 0; i < n; ++i) best = std::max(best, ev[i].real());
    CHECK(principal_eigenvalue(a) == doctest::Approx(best).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("irreducibility") {
  Matrix a(2);
  a(0, 1) = 1.0;
  CHECK_FALSE(is_irreducible(a));
  a(1, 0) = 0.5;
  CHECK(is_irreducible(a));
}

TEST_CASE("assumption checks") {
  const AssumptionReport w = verify_assumptions(make_wnv({}), 1000, 7);
  for (const auto& c : w.checks) {
    CAPTURE(c.name);
    if (c.name == "f4" || c.name == "f5")
      CHECK(c.status == CheckStatus::NotChecked);
    else
      CHECK(c.status == CheckStatus::Pass);
  }
  const AssumptionReport ch = verify_assumptions(make_cholera({}), 1000, 7);
  CHECK(ch.failures() == std::vector<std::string>{"f6"});
  CHECK(ch.at("f6").witness);
}

TEST_CASE("lipschitz bound dominates sampled difference quotients") {
  const ReactionModel m = make_cholera({});
  const double L = lipschitz_bound(m);
  const auto pts = stratified_samples(m.sampling_box(), 200, 9);
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    const State a = eval_F(m, pts[k]), b = eval_F(m, pts[k + 1]);
    double df = 0.0, du = 0.0;
    for (int i = 0; i < 2; ++i) {
      df = std::max(df, std::abs(a[i] - b[i]));
      du = std::max(du, std::abs(pts[k][i] - pts[k + 1][i]));
    }
    CHECK(df <= L * du + 1e-12);
  }
}
