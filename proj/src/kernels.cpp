#include "nlfb/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlfb/errors.hpp"
#include "quadrature.hpp"

namespace nlfb {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(Errc::InvalidArgument, std::string(what) + " must be a positive finite number");
}

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0, slope_stderr = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = std::max(0.0, syy - fit.slope * sxy);
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  fit.slope_stderr = n > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  return fit;
}

// Polynomial-tail detector shared by the family and table analyses. Returns
// the log-log fit when it describes the data and beats an exponential fit.
std::optional<LineFit> polynomial_tail_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 4) return std::nullopt;
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  const LineFit loglog = least_squares(lx, ly);
  const LineFit semilog = least_squares(x, ly);
  if (loglog.r2 >= 0.999 && loglog.r2 >= semilog.r2) return loglog;
  return std::nullopt;
}

}  // namespace

std::string family_name(const KernelSpec& spec) {
  return std::visit(Overloaded{
                        [](const UniformSpec&) { return std::string("uniform"); },
                        [](const LaplaceSpec&) { return std::string("laplace"); },
                        [](const GaussianSpec&) { return std::string("gaussian"); },
                        [](const PowerLawSpec&) { return std::string("powerlaw"); },
                        [](const TableSpec&) { return std::string("table"); },
                    },
                    spec);
}

double Kernel::density(double x) const {
  const double ax = std::abs(x);
  return std::visit(
      Overloaded{
          [&](const UniformSpec& s) { return ax <= s.radius ? normalizer_ : 0.0; },
          [&](const LaplaceSpec& s) { return normalizer_ * std::exp(-ax / s.scale); },
          [&](const GaussianSpec& s) { return normalizer_ * std::exp(-0.5 * ax * ax / (s.sigma * s.sigma)); },
          [&](const PowerLawSpec& s) { return normalizer_ * std::pow(s.core_width + ax, -s.gamma); },
          [&](const TableSpec&) {
            if (ax > half_x_.back()) return 0.0;
            auto it = std::upper_bound(half_x_.begin(), half_x_.end(), ax);
            if (it == half_x_.end()) return half_v_.back();
            const auto k = static_cast<size_t>(it - half_x_.begin());
            const double t = (ax - half_x_[k - 1]) / (half_x_[k] - half_x_[k - 1]);
            return (1.0 - t) * half_v_[k - 1] + t * half_v_[k];
          },
      },
      spec_);
}

double Kernel::exact_tail(double z) const {
  return std::visit(
      Overloaded{
          [&](const UniformSpec& s) { return z >= s.radius ? 0.0 : 0.5 * (s.radius - z) / s.radius; },
          [&](const LaplaceSpec& s) { return 0.5 * std::exp(-z / s.scale); },
          [&](const GaussianSpec& s) { return 0.5 * std::erfc(z / (s.sigma * std::numbers::sqrt2)); },
          [&](const PowerLawSpec& s) { return 0.5 * std::pow(s.core_width / (s.core_width + z), s.gamma - 1.0); },
          [&](const TableSpec&) {
            if (z >= half_x_.back()) return 0.0;
            double acc = 0.0;
            auto it = std::upper_bound(half_x_.begin(), half_x_.end(), z);
            auto k = static_cast<size_t>(it - half_x_.begin());
            const double jz = density(z);
            acc += 0.5 * (half_x_[k] - z) * (jz + half_v_[k]);
            for (size_t i = k; i + 1 < half_x_.size(); ++i)
              acc += 0.5 * (half_x_[i + 1] - half_x_[i]) * (half_v_[i] + half_v_[i + 1]);
            return acc;
          },
      },
      spec_);
}

double Kernel::tail_mass(double z) const {
  if (z < 0.0) return 1.0 - tail_mass(-z);
  // piecewise-quadratic and cheap; log interpolation degrades where it hits 0
  if (std::holds_alternative<TableSpec>(spec_)) return exact_tail(z);
  if (z >= tail_z_.back()) return compact_ ? 0.0 : exact_tail(z);
  auto it = std::upper_bound(tail_z_.begin(), tail_z_.end(), z);
  const auto k = static_cast<size_t>(it - tail_z_.begin()) - 1;
  const double z0 = tail_z_[k], z1 = tail_z_[k + 1];
  const double h = z1 - z0, t = (z - z0) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
  const double v0 = tail_v_[k], v1 = tail_v_[k + 1];
  if (v0 > 0.0 && v1 > 0.0) {
    // cubic Hermite on log(tail) with exact slopes -J/tail
    const double y = h00 * std::log(v0) + h10 * h * (-tail_j_[k] / v0) + h01 * std::log(v1) +
                     h11 * h * (-tail_j_[k + 1] / v1);
    return std::exp(y);
  }
  const double v = h00 * v0 + h10 * h * (-tail_j_[k]) + h01 * v1 + h11 * h * (-tail_j_[k + 1]);
  return std::clamp(v, 0.0, v0);
}

Kernel make_kernel(const KernelSpec& spec, double eps_tail) {
  if (!(eps_tail > 0.0 && eps_tail <= 1e-4))
    throw Error(Errc::InvalidArgument, "eps_tail must lie in (0, 1e-4]");
  Kernel k;
  k.spec_ = spec;
  k.eps_tail_ = eps_tail;
  double support = kInfinite;

  std::visit(Overloaded{
                 [&](const UniformSpec& s) {
                   require_positive(s.radius, "uniform radius");
                   k.normalizer_ = 0.5 / s.radius;
                   k.core_scale_ = s.radius;
                   support = s.radius;
                   k.breakpoints_ = {0.0, s.radius};
                 },
                 [&](const LaplaceSpec& s) {
                   require_positive(s.scale, "laplace scale");
                   k.normalizer_ = 0.5 / s.scale;
                   k.core_scale_ = s.scale;
                   k.breakpoints_ = {0.0};
                 },
                 [&](const GaussianSpec& s) {
                   require_positive(s.sigma, "gaussian sigma");
                   k.normalizer_ = 1.0 / (s.sigma * std::sqrt(2.0 * std::numbers::pi));
                   k.core_scale_ = s.sigma;
                 },
                 [&](const PowerLawSpec& s) {
                   if (!(s.gamma > 1.0))
                     throw Error(Errc::NonNormalizable, "powerlaw kernel needs gamma > 1, got " +
                                                            std::to_string(s.gamma));
                   require_positive(s.core_width, "powerlaw core_width");
                   k.normalizer_ = 0.5 * (s.gamma - 1.0) * std::pow(s.core_width, s.gamma - 1.0);
                   k.core_scale_ = s.core_width;
                   k.breakpoints_ = {0.0};
                 },
                 [&](const TableSpec& s) {
                   const size_t n = s.x.size();
                   if (n < 2 || s.values.size() != n)
                     throw Error(Errc::InvalidArgument, "table kernel needs >= 2 samples and matching sizes");
                   for (double v : s.values)
                     if (v < 0.0) throw Error(Errc::NegativeTableValue, "table kernel sample is negative");
                   for (size_t i = 0; i + 1 < n; ++i)
                     if (!(s.x[i + 1] > s.x[i])) throw Error(Errc::InvalidArgument, "table grid must increase");
                   const double scale = std::max(std::abs(s.x.front()), std::abs(s.x.back()));
                   double vmax = *std::max_element(s.values.begin(), s.values.end());
                   for (size_t i = 0; i < n; ++i) {
                     if (std::abs(s.x[i] + s.x[n - 1 - i]) > 1e-12 * scale)
                       throw Error(Errc::InvalidArgument, "table grid must be symmetric about 0");
                     if (std::abs(s.values[i] - s.values[n - 1 - i]) > 1e-12 * vmax)
                       throw Error(Errc::InvalidArgument, "table values must be even");
                   }
                   double mass = 0.0;
                   for (size_t i = 0; i + 1 < n; ++i)
                     mass += 0.5 * (s.x[i + 1] - s.x[i]) * (s.values[i] + s.values[i + 1]);
                   if (!(mass > 0.0)) throw Error(Errc::NonNormalizable, "table kernel has zero mass");
                   k.normalizer_ = 1.0 / mass;
                   if (n % 2 == 0) {
                     // 0 lies between the two middle samples
                     k.half_x_.push_back(0.0);
                     k.half_v_.push_back(k.normalizer_ * 0.5 * (s.values[n / 2 - 1] + s.values[n / 2]));
                   }
                   for (size_t i = (n - 1) / 2 + (n % 2 == 0 ? 1 : 0); i < n; ++i) {
                     k.half_x_.push_back(s.x[i]);
                     k.half_v_.push_back(k.normalizer_ * s.values[i]);
                   }
                   if (!(k.half_v_.front() > 0.0)) throw Error(Errc::InvalidArgument, "table kernel needs J(0) > 0");
                   support = k.half_x_.back();
                   k.breakpoints_ = k.half_x_;
                   const double half = 0.5 * k.half_v_.front();
                   k.core_scale_ = support;
                   for (size_t i = 1; i < k.half_x_.size(); ++i) {
                     if (k.half_v_[i] <= half) {
                       const double t = (k.half_v_[i - 1] - half) / (k.half_v_[i - 1] - k.half_v_[i]);
                       k.core_scale_ = k.half_x_[i - 1] + t * (k.half_x_[i] - k.half_x_[i - 1]);
                       break;
                     }
                   }
                 },
             },
             spec);

  k.compact_ = std::isfinite(support);

  // geometric tail mesh, with table breakpoints merged in
  const double base = 1e-3 * k.core_scale_;
  std::vector<double> z{0.0};
  for (double zz = base;; zz *= Kernel::kMeshRatio) {
    if (k.compact_ && zz >= support) break;
    z.push_back(zz);
    if (!k.compact_ && k.exact_tail(zz) < eps_tail) break;
  }
  if (k.compact_) {
    z.push_back(support);
    for (double b : k.breakpoints_) z.push_back(b);
    std::sort(z.begin(), z.end());
    std::vector<double> merged;
    for (double v : z)
      if (merged.empty() || v - merged.back() > 1e-9 * k.core_scale_) merged.push_back(v);
      else merged.back() = std::max(merged.back(), v);
    z.swap(merged);
  }
  k.tail_z_ = z;
  k.tail_v_.resize(z.size());
  k.tail_j_.resize(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    k.tail_v_[i] = k.exact_tail(z[i]);
    // one-sided (inner) density at the support end
    k.tail_j_[i] = (k.compact_ && i + 1 == z.size()) ? k.density(std::nextafter(z[i], 0.0)) : k.density(z[i]);
  }
  k.cutoff_ = k.compact_ ? support : z.back();
  k.mass_deficit_ = 2.0 * k.exact_tail(k.cutoff_);
  return k;
}

namespace {

// Polynomial-tail analysis of the samples of a table kernel (outer decade).
std::optional<LineFit> table_tail_fit(const Kernel& kernel) {
  const auto& s = std::get<TableSpec>(kernel.spec());
  const double xmax = s.x.back();
  std::vector<double> xs, ys;
  for (size_t i = 0; i < s.x.size(); ++i)
    if (s.x[i] >= 0.1 * xmax && s.x[i] > 0.0 && s.values[i] > 0.0) {
      xs.push_back(s.x[i]);
      ys.push_back(s.values[i]);
    }
  return polynomial_tail_fit(xs, ys);
}

double table_integral(const Kernel& kernel, double lambda_exp, bool weight_x) {
  const auto& rule = detail::GaussLegendre<10>::instance();
  auto bps = kernel.breakpoints();
  double acc = 0.0;
  for (size_t i = 0; i + 1 < bps.size(); ++i)
    acc += rule.integrate(
        [&](double x) { return (weight_x ? x : 1.0) * std::exp(lambda_exp * x) * kernel.density(x); }, bps[i],
        bps[i + 1]);
  return acc;
}

}  // namespace

double first_moment(const Kernel& kernel) {
  return std::visit(Overloaded{
                        [](const UniformSpec& s) { return 0.25 * s.radius; },
                        [](const LaplaceSpec& s) { return 0.5 * s.scale; },
                        [](const GaussianSpec& s) { return s.sigma / std::sqrt(2.0 * std::numbers::pi); },
                        [](const PowerLawSpec& s) {
                          return s.gamma <= 2.0 ? kInfinite : s.core_width / (2.0 * (s.gamma - 2.0));
                        },
                        [&](const TableSpec&) {
                          auto fit = table_tail_fit(kernel);
                          if (fit && -fit->slope <= 2.0) return kInfinite;
                          return table_integral(kernel, 0.0, true);
                        },
                    },
                    kernel.spec());
}

double half_laplace(const Kernel& kernel, double lambda) {
  return std::visit(
      Overloaded{
          [&](const UniformSpec& s) {
            const double a = lambda * s.radius;
            if (std::abs(a) < 1e-8) return 0.5 * (1.0 + 0.5 * a);
            return std::expm1(a) / (2.0 * a);
          },
          [&](const LaplaceSpec& s) { return lambda * s.scale >= 1.0 ? kInfinite : 0.5 / (1.0 - lambda * s.scale); },
          [&](const GaussianSpec& s) {
            const double a = lambda * s.sigma;
            return 0.5 * std::exp(0.5 * a * a) * std::erfc(-a / std::numbers::sqrt2);
          },
          [&](const PowerLawSpec& s) {
            if (lambda > 0.0) return kInfinite;
            if (lambda == 0.0) return 0.5;
            // geometric panels until exp(lambda x) is negligible
            const auto& rule = detail::GaussLegendre<20>::instance();
            const double xmax = 60.0 / -lambda;
            double a = 0.0, b = s.core_width, acc = 0.0;
            while (a < xmax) {
              b = std::min(b, xmax);
              acc += rule.integrate([&](double x) { return std::exp(lambda * x) * kernel.density(x); }, a, b);
              a = b;
              b *= 2.0;
            }
            return acc;
          },
          [&](const TableSpec&) {
            if (lambda > 0.0 && table_tail_fit(kernel)) return kInfinite;
            return table_integral(kernel, lambda, false);
          },
      },
      kernel.spec());
}

double exp_moment(const Kernel& kernel, double lambda) {
  if (!(lambda > 0.0)) throw Error(Errc::InvalidLambda, "exp_moment needs lambda > 0");
  return half_laplace(kernel, lambda);
}

double two_sided_mgf(const Kernel& kernel, double lambda) {
  const double a = half_laplace(kernel, lambda);
  if (!std::isfinite(a)) return kInfinite;
  const double b = half_laplace(kernel, -lambda);
  return std::isfinite(b) ? a + b : kInfinite;
}

double mgf_abscissa(const Kernel& kernel) {
  return std::visit(Overloaded{
                        [](const UniformSpec&) { return kInfinite; },
                        [](const LaplaceSpec& s) { return 1.0 / s.scale; },
                        [](const GaussianSpec&) { return kInfinite; },
                        [](const PowerLawSpec&) { return 0.0; },
                        [&](const TableSpec&) { return table_tail_fit(kernel) ? 0.0 : kInfinite; },
                    },
                    kernel.spec());
}

ClassReport classify(const Kernel& kernel) {
  ClassReport report;
  report.satisfies_j1 = std::isfinite(first_moment(kernel));
  report.satisfies_j2 = mgf_abscissa(kernel) > 0.0;
  if (std::holds_alternative<TableSpec>(kernel.spec())) {
    if (auto fit = table_tail_fit(kernel)) {
      report.gamma_hat = -fit->slope;
      report.gamma_stderr = fit->slope_stderr;
    }
    return report;
  }
  if (kernel.compact()) return report;
  auto z = kernel.tail_nodes();
  auto v = kernel.tail_values();
  const double zmax = z.back();
  std::vector<double> xs, ys;
  for (size_t i = 0; i < z.size(); ++i)
    if (z[i] >= 0.1 * zmax && v[i] > 0.0) {
      xs.push_back(z[i]);
      ys.push_back(v[i]);
    }
  if (auto fit = polynomial_tail_fit(xs, ys)) {
    // tail ~ z^(1 - gamma)
    report.gamma_hat = 1.0 - fit->slope;
    report.gamma_stderr = fit->slope_stderr;
  }
  return report;
}

}  // namespace nlfb
