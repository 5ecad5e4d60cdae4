#include <cmath>
#include <random>

#include "doctest.h"
#include "nlfb/errors.hpp"
#include "nlfb/nonlocal_ops.hpp"
#include "oracles.hpp"

using namespace nlfb;

namespace {

// W_o = int_{-dx}^{dx} J(o dx + s) (1 - |s|/dx) ds, split at the kinks.
double weight_oracle(const Kernel& k, double dx, std::int64_t o) {
  std::vector<double> cuts{-dx, 0.0, dx};
  for (double p : k.breakpoints())
    for (double b : {-p, p}) {
      const double s = b - o * dx;
      if (s > -dx && s < dx) cuts.push_back(s);
    }
  std::sort(cuts.begin(), cuts.end());
  double w = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    w += oracle::simpson([&](double s) { return k.density(o * dx + s) * (1.0 - std::abs(s) / dx); }, cuts[i],
                         cuts[i + 1], 1e-15);
  return w;
}

std::vector<double> random_field(size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> f(n);
  for (double& v : f) v = uni(rng);
  return f;
}

const std::vector<KernelSpec> kSpecs{UniformSpec{1.0}, LaplaceSpec{1.0}, GaussianSpec{0.8}, PowerLawSpec{2.5, 1.0},
                                     TableSpec{{-2, -1, 0, 1, 2}, {0, 1, 3, 1, 0}}};

}  // namespace

TEST_CASE("hat weights match quadrature of the kernel") {
  for (const auto& spec : kSpecs) {
    const Kernel k = make_kernel(spec);
    const NonlocalOperator op(k, 0.1);
    CAPTURE(k.family());
    for (std::int64_t o : {0, 1, 3, 9, 10, 11, 25})
      CHECK(op.weight(o) == doctest::Approx(weight_oracle(k, 0.1, o)).epsilon(1e-9).scale(1e-6));
  }
}

TEST_CASE("weights sum to one up to the truncated tail") {
  for (const auto& spec : kSpecs) {
    const NonlocalOperator op(make_kernel(spec), 0.05);
    double s = op.weight(0);
    for (std::int64_t o = 1; o <= op.range(); ++o) s += 2.0 * op.weight(o);
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(op.weight_tail(0) == doctest::Approx(0.5 * (1.0 + op.weight(0))).epsilon(1e-6));
  }
}

TEST_CASE("all convolution paths agree with a brute-force sum") {
  for (const auto& spec : kSpecs) {
    const NonlocalOperator op(make_kernel(spec), 0.1);
    const auto f = random_field(1500, 3);
    const std::int64_t first = -700, last = first + 1499;
    std::vector<double> brute(f.size(), 0.0);
    for (std::int64_t j = first; j <= last; ++j)
      for (std::int64_t k = first; k <= last; ++k)
        if (std::abs(j - k) <= op.range()) brute[j - first] += op.weight(std::abs(j - k)) * f[k - first];
    for (ConvPath p : {ConvPath::Serial, ConvPath::Direct, ConvPath::Fft, ConvPath::Auto}) {
      std::vector<double> out(f.size());
      op.convolve(f, first, std::nullopt, first, last, out, p);
      double err = 0.0;
      for (size_t n = 0; n < f.size(); ++n) err = std::max(err, std::abs(out[n] - brute[n]));
      CAPTURE(static_cast<int>(p));
      CHECK(err < 1e-10);
    }
  }
}

TEST_CASE("FFT path for heavy tails matches the direct sum") {
  const NonlocalOperator op(make_kernel(PowerLawSpec{1.5, 1.0}), 0.25);
  const auto f = random_field(6000, 8);
  std::vector<double> a(f.size()), b(f.size());
  const Interval bounds{-3000 * 0.25 - 0.1, 2999 * 0.25 + 0.1};
  op.convolve(f, -3000, bounds, -3000, 2999, a, ConvPath::Fft);
  op.convolve(f, -3000, bounds, -3000, 2999, b, ConvPath::Direct);
  double err = 0.0;
  for (size_t n = 0; n < f.size(); ++n) err = std::max(err, std::abs(a[n] - b[n]));
  CHECK(err < 1e-10);
}

// Max errors of the convolution and of the right boundary flux for
// f(x) = 1 + x/4 on (g, h), against adaptive quadrature of the same
// piecewise-linear function (vanishing at g and h).
std::pair<double, double> free_boundary_errors(const Kernel& k, double dx) {
  const double g = -2.03, h = 1.96;
  const NonlocalOperator op(k, dx);
  const auto first = static_cast<std::int64_t>(std::ceil(g / dx)), last = static_cast<std::int64_t>(std::floor(h / dx));
  std::vector<double> f;
  for (std::int64_t j = first; j <= last; ++j) f.push_back(1.0 + j * dx / 4.0);
  auto interp = [&](double y) {
    const double xl = first * dx, xr = last * dx;
    if (y <= g || y >= h) return 0.0;
    if (y < xl) return f.front() * (y - g) / (xl - g);
    if (y > xr) return f.back() * (h - y) / (h - xr);
    const auto n = static_cast<size_t>(std::min<double>(std::floor((y - xl) / dx), f.size() - 2));
    const double s = (y - xl) / dx - n;
    return f[n] * (1 - s) + f[n + 1] * s;
  };
  std::vector<double> cuts{g, h};
  for (std::int64_t n = first; n <= last; ++n) cuts.push_back(n * dx);
  std::sort(cuts.begin(), cuts.end());
  auto integrate = [&](const std::function<double(double)>& fn) {
    double q = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) q += oracle::simpson(fn, cuts[i], cuts[i + 1], 1e-13);
    return q;
  };
  std::vector<double> out(f.size());
  op.convolve(f, first, Interval{g, h}, first, last, out);
  double conv_err = 0.0;
  for (std::int64_t j = first; j <= last; ++j) {
    const double x = j * dx;
    const double q = integrate([&](double y) { return k.density(x - y) * interp(y); });
    conv_err = std::max(conv_err, std::abs(out[j - first] - q));
  }
  const double qr = integrate([&](double y) { return k.tail_mass(h - y) * interp(y); });
  const double flux_err = std::abs(op.boundary_flux(f, first, Interval{g, h}, Side::Right) - qr);
  return {conv_err, flux_err};
}

TEST_CASE("free-boundary quadrature converges at second order") {
  for (const auto& spec : {KernelSpec{LaplaceSpec{0.5}}, KernelSpec{GaussianSpec{0.7}}}) {
    const Kernel k = make_kernel(spec);
    const auto [c1, f1] = free_boundary_errors(k, 0.1);
    const auto [c2, f2] = free_boundary_errors(k, 0.05);
    const auto [c3, f3] = free_boundary_errors(k, 0.025);
    CAPTURE(k.family());
    CAPTURE(c1);
    CAPTURE(c3);
    CAPTURE(f1);
    CAPTURE(f3);
    CHECK(c1 < 5e-3);
    CHECK(f1 < 5e-3);
    // halving twice gains at least a factor 10 for the convolution (16 for clean second order)
    CHECK(c3 < c1 / 10.0);
    // the end-cell gaps change with dx, so the flux gain is noisier
    CHECK(f3 < f1 / 4.0);
  }
}

TEST_CASE("convolving a constant over a wide window returns it") {
  const NonlocalOperator op(make_kernel(LaplaceSpec{1.0}), 0.1);
  std::vector<double> f(4001, 2.0), out(f.size());
  op.convolve(f, -2000, std::nullopt, -2000, 2000, out);
  CHECK(out[2000] == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("coarse meshes are rejected") {
  try {
    NonlocalOperator op(make_kernel(UniformSpec{1.0}), 0.5);
    FAIL("accepted a coarse mesh");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MeshTooCoarse);
  }
}
