#include <Eigen/Eigenvalues>
#include <cmath>

#include "doctest.h"
#include "nlfb/errors.hpp"
#include "nlfb/semiwave.hpp"
#include "oracles.hpp"

using namespace nlfb;

namespace {

std::vector<Kernel> laplace_pair() {
  const Kernel k = make_kernel(LaplaceSpec{1.0});
  return {k, k};
}

SemiWaveOptions coarse() {
  SemiWaveOptions o;
  o.dx = 0.2;
  return o;
}

}  // namespace

TEST_CASE("semi-wave profile is monotone with the right end values") {
  const ReactionModel m = make_wnv({});
  const SemiWaveSolution s = solve_profile(0.2, m, laplace_pair(), 30.0, 1e-9, coarse());
  CHECK(s.converged);
  CHECK(s.monotone);
  CHECK(s.residual < 1e-6);
  for (int i = 0; i < 2; ++i) {
    CHECK(s.phi[i].front() == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(s.phi[i].back() >= 0.0);
    CHECK(s.phi[i].back() < 0.2);
  }
  CHECK(s.mid_fraction() > 0.99);
}

TEST_CASE("flux functional is the trapezoid rule of the boundary flux") {
  const SemiWaveSolution s = solve_profile(0.2, make_wnv({}), laplace_pair(), 20.0, 1e-9, coarse());
  const std::vector<double> mu{0.7, 1.3};
  double ref = 0.0;
  for (int i = 0; i < 2; ++i)
    for (size_t k = 0; k < s.x.size(); ++k) {
      const double w = (k == 0 || k + 1 == s.x.size()) ? 0.5 : 1.0;
      ref += mu[i] * w * s.dx * s.phi[i][k] * s.kernels[i].tail_mass(-s.x[k]);
    }
  CHECK(flux_functional(s, mu) == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("c0 solves G(c) = c and increases with mu") {
  const ReactionModel m = make_wnv({});
  const std::vector<double> mu1{1.0, 1.0}, mu4{4.0, 4.0};
  const C0Result a = find_c0(m, laplace_pair(), mu1, 30.0, 1e-4, coarse());
  const C0Result b = find_c0(m, laplace_pair(), mu4, 30.0, 1e-4, coarse());
  CHECK(flux_functional(a.sol, mu1) == doctest::Approx(a.c0).epsilon(2e-3));
  CHECK(a.single_sign_change);
  CHECK(a.c0 > 0.0);
  CHECK(b.c0 > a.c0);
  CHECK(b.c0 < linearized_speed(m, laplace_pair()));
}

TEST_CASE("linearized speed against a brute-force minimization") {
  // s(lambda) = largest eigenvalue of diag(mgf(lambda) - 1) + grad F(0) with mgf by quadrature
  const ReactionModel m = make_wnv({});
  const Kernel k = make_kernel(LaplaceSpec{1.0});
  const Matrix j0 = jacobian(m, State{0.0, 0.0});
  double best = 1e300;
  for (double lam = 0.01; lam < 0.999; lam += 0.001) {
    const double mgf = oracle::simpson_pieces([&](double y) { return k.density(y) * std::exp(-lam * y); }, -80, 80, 160);
    Eigen::Matrix2d a;
    a << j0(0, 0) + mgf - 1.0, j0(0, 1), j0(1, 0), j0(1, 1) + mgf - 1.0;
    best = std::min(best, a.eigenvalues().real().maxCoeff() / lam);
  }
  CHECK(linearized_speed(m, {k, k}) == doctest::Approx(best).epsilon(1e-4));
}

TEST_CASE("heavy tails") {
  const Kernel pl = make_kernel(PowerLawSpec{1.5, 1.0});
  const std::vector<double> mu{1.0, 1.0};
  try {
    find_c0(make_wnv({}), {pl, pl}, mu, 30.0, 1e-3);
    FAIL("expected J1 violation");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::J1Violated);
  }
  const std::vector<double> Ls{30.0};
  const CStarResult r = estimate_cstar(make_wnv({}), {pl, pl}, Ls, {});
  CHECK(std::isinf(r.cstar));
  CHECK(r.reason.find("J2") != std::string::npos);
}

TEST_CASE("traveling-wave threshold sits above the semi-wave speeds") {
  SemiWaveOptions o = coarse();
  const std::vector<double> Ls{30.0};
  const CStarResult r = estimate_cstar(make_wnv({}), laplace_pair(), Ls, {}, o);
  REQUIRE(r.bracket);
  CHECK(r.bracket->first < r.bracket->second);
  CHECK(r.cstar >= r.bracket->first);
  CHECK(r.cstar <= r.bracket->second);
  const std::vector<double> mu{2.0, 2.0};
  CHECK(r.cstar > find_c0(make_wnv({}), laplace_pair(), mu, 30.0, 1e-3, o).c0);
  CHECK_THROWS_AS(estimate_cstar(make_wnv({}), laplace_pair(), std::span<const double>{}, {}, o), Error);
}
