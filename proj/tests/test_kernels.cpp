#include <cmath>
#include <vector>

#include "doctest.h"
#include "nlfb/errors.hpp"
#include "nlfb/kernels.hpp"
#include "oracles.hpp"

using namespace nlfb;

namespace {

// Integral of J over [a, b] by adaptive Simpson, split at the kernel's kinks.
double mass(const Kernel& k, double a, double b) {
  std::vector<double> cuts{a};
  for (double p : k.breakpoints())
    for (double s : {-p, p})
      if (s > a && s < b) cuts.push_back(s);
  if (a < 0.0 && b > 0.0) cuts.push_back(0.0);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total += oracle::simpson_pieces([&](double x) { return k.density(x); }, cuts[i], cuts[i + 1], 64, 1e-13);
  return total;
}

std::vector<KernelSpec> all_specs() {
  return {UniformSpec{1.5},         LaplaceSpec{0.7},
          GaussianSpec{2.0},        PowerLawSpec{1.5, 1.0},
          PowerLawSpec{3.0, 0.5},   TableSpec{{-2, -1, 0, 1, 2}, {0, 1, 2, 1, 0}}};
}

}  // namespace

TEST_CASE("kernels integrate to one") {
  for (const auto& spec : all_specs()) {
    const Kernel k = make_kernel(spec);
    CAPTURE(k.family());
    const double R = std::min(k.cutoff_radius(), 1e4);
    const double inside = mass(k, -R, R);
    CHECK(inside + 2.0 * k.tail_mass(R) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("tail mass matches quadrature of the density") {
  for (const auto& spec : all_specs()) {
    const Kernel k = make_kernel(spec);
    CAPTURE(k.family());
    CHECK(k.tail_mass(0.0) == doctest::Approx(0.5).epsilon(1e-9));
    for (double z : {0.1, 0.5, 1.0, 1.7, 3.0}) {
      const double z2 = z + 2.0;
      CAPTURE(z);
      CHECK(k.tail_mass(z) - k.tail_mass(z2) == doctest::Approx(mass(k, z, z2)).epsilon(1e-6));
    }
  }
}

TEST_CASE("density is even and tails are monotone") {
  for (const auto& spec : all_specs()) {
    const Kernel k = make_kernel(spec);
    double prev = 0.5;
    for (double x = 0.0; x < 20.0; x += 0.37) {
      CHECK(k.density(x) == k.density(-x));
      CHECK(k.tail_mass(x) <= prev + 1e-15);
      prev = k.tail_mass(x);
    }
  }
}

TEST_CASE("power-law tail has the closed form") {
  const double g = 2.5, w = 0.5;
  const Kernel k = make_kernel(PowerLawSpec{g, w});
  for (double z : {0.0, 1.0, 10.0, 100.0}) CHECK(k.tail_mass(z) == doctest::Approx(0.5 * std::pow(w / (w + z), g - 1)));
}

TEST_CASE("invalid kernels are rejected") {
  auto code = [](const KernelSpec& s) {
    try {
      make_kernel(s);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  CHECK(code(PowerLawSpec{1.0, 1.0}) == Errc::NonNormalizable);
  CHECK(code(PowerLawSpec{0.5, 1.0}) == Errc::NonNormalizable);
  CHECK(code(TableSpec{{-1, 0, 1}, {0.1, -0.2, 0.1}}) == Errc::NegativeTableValue);
  CHECK_THROWS_AS(make_kernel(LaplaceSpec{-1.0}), Error);
}

TEST_CASE("moments against closed forms and quadrature") {
  const double s = 0.8;
  const Kernel lap = make_kernel(LaplaceSpec{s});
  CHECK(first_moment(lap) == doctest::Approx(s / 2.0).epsilon(1e-6));
  for (double lam : {0.2, 0.6, 1.0}) CHECK(exp_moment(lap, lam) == doctest::Approx(0.5 / (1.0 - lam * s)).epsilon(1e-6));
  CHECK(std::isinf(exp_moment(lap, 1.0 / s + 0.1)));
  CHECK(mgf_abscissa(lap) == doctest::Approx(1.0 / s).epsilon(1e-3));

  const Kernel gau = make_kernel(GaussianSpec{1.3});
  for (double lam : {-1.0, 0.5, 2.0})
    CHECK(two_sided_mgf(gau, lam) == doctest::Approx(std::exp(0.5 * 1.3 * 1.3 * lam * lam)).epsilon(1e-6));

  const Kernel uni = make_kernel(UniformSpec{2.0});
  const double q = oracle::simpson([&](double x) { return x * uni.density(x); }, 0.0, 2.0);
  CHECK(first_moment(uni) == doctest::Approx(q).epsilon(1e-8));
  CHECK(half_laplace(uni, -1.0) == doctest::Approx(oracle::simpson([&](double x) { return std::exp(-x) / 4.0; }, 0, 2)));

  CHECK(std::isinf(first_moment(make_kernel(PowerLawSpec{2.0, 1.0}))));
  CHECK(std::isfinite(first_moment(make_kernel(PowerLawSpec{2.5, 1.0}))));
  CHECK(mgf_abscissa(make_kernel(PowerLawSpec{3.0, 1.0})) == 0.0);
}

TEST_CASE("classification of thin and heavy tails") {
  for (double g : {1.5, 2.0, 3.0}) {
    const ClassReport r = classify(make_kernel(PowerLawSpec{g, 1.0}));
    CAPTURE(g);
    CHECK(r.satisfies_j1 == (g > 2.0));
    CHECK_FALSE(r.satisfies_j2);
    REQUIRE(r.gamma_hat);
    CHECK(std::abs(*r.gamma_hat - g) <= 0.1);
  }
  for (const KernelSpec& s : {KernelSpec{LaplaceSpec{1.0}}, KernelSpec{UniformSpec{1.0}}, KernelSpec{GaussianSpec{1.0}}}) {
    const ClassReport r = classify(make_kernel(s));
    CHECK(r.satisfies_j1);
    CHECK(r.satisfies_j2);
  }
}

TEST_CASE("cutoff radius honours the tail tolerance") {
  for (double eps : {1e-6, 1e-8, 1e-10}) {
    const Kernel k = make_kernel(LaplaceSpec{1.0}, eps);
    CHECK(k.tail_mass(k.cutoff_radius()) < eps);
    CHECK(k.mass_deficit() == doctest::Approx(2.0 * k.tail_mass(k.cutoff_radius())));
  }
  const Kernel u = make_kernel(UniformSpec{3.0});
  CHECK(u.compact());
  CHECK(u.cutoff_radius() == 3.0);
  CHECK(u.tail_mass(3.5) == 0.0);
}
