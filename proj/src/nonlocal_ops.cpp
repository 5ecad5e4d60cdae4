#include "nlfb/nonlocal_ops.hpp"

#include <algorithm>
#include <cmath>

#include "fft_convolver.hpp"
#include "nlfb/errors.hpp"
#include "quadrature.hpp"

namespace nlfb {

namespace {

constexpr std::int64_t kMaxRange = std::int64_t{1} << 40;

using Rule = detail::GaussLegendre<16>;

// int_a^b J(y) w(y) dy, split at the kernel breakpoints inside (a, b)
template <class W>
double integrate_split(const Kernel& k, double a, double b, W&& w) {
  const auto bps = k.breakpoints();
  const auto& rule = Rule::instance();
  auto f = [&](double y) { return k.density(y) * w(y); };
  double lo = a, sum = 0.0;
  auto it = std::upper_bound(bps.begin(), bps.end(), a);
  for (; it != bps.end() && *it < b; ++it) {
    sum += rule.integrate(f, lo, *it);
    lo = *it;
  }
  return sum + rule.integrate(f, lo, b);
}

}  // namespace

NonlocalOperator::NonlocalOperator(const Kernel& kernel, double dx)
    : kernel_(kernel), dx_(dx), grow_mutex_(std::make_unique<std::mutex>()), fft_(std::make_unique<FftConvolver>()) {
  if (!(dx > 0.0) || !std::isfinite(dx)) throw Error(Errc::InvalidArgument, "mesh spacing must be positive");
  if (dx > kernel.core_scale() / 4.0)
    throw Error(Errc::MeshTooCoarse, "dx = " + std::to_string(dx) + " exceeds a quarter of the kernel core scale " +
                                         std::to_string(kernel.core_scale()));
  const double r = kernel.cutoff_radius() / dx;
  if (kernel.compact()) {
    range_ = static_cast<std::int64_t>(std::min<double>(std::ceil(r + 1.0) - 1.0, static_cast<double>(kMaxRange)));
  } else {
    range_ = static_cast<std::int64_t>(std::min<double>(std::ceil(r) + 1.0, static_cast<double>(kMaxRange)));
  }
  reserve(std::min<std::int64_t>(range_, 4096));
}

NonlocalOperator::~NonlocalOperator() = default;
NonlocalOperator::NonlocalOperator(NonlocalOperator&&) noexcept = default;
NonlocalOperator& NonlocalOperator::operator=(NonlocalOperator&&) noexcept = default;

double NonlocalOperator::compute_weight(std::int64_t offset) const {
  const double c = static_cast<double>(offset) * dx_;
  if (offset == 0) return 2.0 * integrate_split(kernel_, 0.0, dx_, [&](double y) { return 1.0 - y / dx_; });
  const double left = integrate_split(kernel_, c - dx_, c, [&](double y) { return 1.0 - (c - y) / dx_; });
  const double right = integrate_split(kernel_, c, c + dx_, [&](double y) { return 1.0 - (y - c) / dx_; });
  return left + right;
}

void NonlocalOperator::reserve(std::int64_t max_offset) const {
  max_offset = std::min(max_offset, range_);
  if (static_cast<std::int64_t>(weights_.size()) > max_offset) return;
  std::lock_guard lock(*grow_mutex_);
  const auto have = static_cast<std::int64_t>(weights_.size());
  if (have > max_offset) return;
  const std::int64_t target = std::min(range_, std::max(max_offset, have + have / 2));
  weights_.reserve(static_cast<std::size_t>(target + 1));
  for (std::int64_t o = have; o <= target; ++o) weights_.push_back(compute_weight(o));
}

double NonlocalOperator::weight(std::int64_t offset) const {
  offset = std::abs(offset);
  if (offset > range_) return 0.0;
  reserve(offset);
  return weights_[static_cast<std::size_t>(offset)];
}

double NonlocalOperator::weight_tail(std::int64_t n) const {
  if (n <= 0) return weight(0) + weight_tail(1);
  const double a = static_cast<double>(n - 1) * dx_;
  const double b = static_cast<double>(n) * dx_;
  return kernel_.tail_mass(b) + integrate_split(kernel_, a, b, [&](double y) { return (y - a) / dx_; });
}

void NonlocalOperator::convolve_serial(std::span<const double> src, std::int64_t first, std::int64_t t0,
                                       std::int64_t t1, std::int64_t reach, std::span<double> out) const {
  const auto s = static_cast<std::int64_t>(src.size());
  for (std::int64_t j = t0; j <= t1; ++j) {
    // plain left-to-right sum over the band, no symmetric pairing
    double sum = 0.0;
    const std::int64_t k0 = std::max<std::int64_t>(0, j - reach - first);
    const std::int64_t k1 = std::min(s - 1, j + reach - first);
    for (std::int64_t k = k0; k <= k1; ++k)
      sum += weights_[static_cast<std::size_t>(std::abs(j - (first + k)))] * src[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(j - t0)] = sum;
  }
}

void NonlocalOperator::convolve_direct(std::span<const double> src, std::int64_t first, std::int64_t t0,
                                       std::int64_t t1, std::int64_t reach, std::span<double> out) const {
  const auto s = static_cast<std::int64_t>(src.size());
  const std::int64_t last = first + s - 1;
  // zero-padded copy covering every index a target can reach
  const std::int64_t lo = std::min(first, t0) - reach;
  const std::int64_t hi = std::max(last, t1) + reach;
  std::vector<double> pad(static_cast<std::size_t>(hi - lo + 1), 0.0);
  std::copy(src.begin(), src.end(), pad.begin() + (first - lo));
  const double* w = weights_.data();
  const double* p = pad.data();
#pragma omp parallel for schedule(static)
  for (std::int64_t j = t0; j <= t1; ++j) {
    const std::int64_t c = j - lo;
    // pairs (j - o, j + o) summed together keep mirrored data bit-symmetric
    const std::int64_t omax = std::min(reach, std::max(j - first, last - j));
    double sum = w[0] * p[c];
    for (std::int64_t o = 1; o <= omax; ++o) sum += w[o] * (p[c - o] + p[c + o]);
    out[static_cast<std::size_t>(j - t0)] = sum;
  }
}

void NonlocalOperator::add_boundary_correction(std::span<const double> src, std::int64_t first,
                                               const Interval& bounds, std::int64_t t0, std::int64_t t1,
                                               std::int64_t reach, std::span<double> out) const {
  // The hat expansion ramps the outermost value down over a full cell; the
  // actual function ramps down to 0 at g (h). Correct by the area difference
  // weighted with the local kernel value W/dx.
  const auto s = static_cast<std::int64_t>(src.size());
  const std::int64_t last = first + s - 1;
  const double vl = src.front(), vr = src.back();
  const double gap_l = std::clamp(static_cast<double>(first) * dx_ - bounds.g, 0.0, dx_);
  const double gap_r = std::clamp(bounds.h - static_cast<double>(last) * dx_, 0.0, dx_);
  const double fl = vl * (gap_l - dx_) / (2.0 * dx_);
  const double fr = vr * (gap_r - dx_) / (2.0 * dx_);
  if (fl == 0.0 && fr == 0.0) return;
  for (std::int64_t j = t0; j <= t1; ++j) {
    const std::int64_t ol = std::abs(j - first), orr = std::abs(j - last);
    const double cl = ol <= reach ? fl * weights_[static_cast<std::size_t>(ol)] : 0.0;
    const double cr = orr <= reach ? fr * weights_[static_cast<std::size_t>(orr)] : 0.0;
    out[static_cast<std::size_t>(j - t0)] += cl + cr;
  }
}

void NonlocalOperator::convolve(std::span<const double> src, std::int64_t first,
                                const std::optional<Interval>& bounds, std::int64_t t0, std::int64_t t1,
                                std::span<double> out, ConvPath path) const {
  if (t1 < t0) return;
  if (out.size() < static_cast<std::size_t>(t1 - t0 + 1))
    throw Error(Errc::InvalidArgument, "convolution output buffer too small");
  if (src.empty()) {
    std::fill(out.begin(), out.begin() + (t1 - t0 + 1), 0.0);
    return;
  }
  const std::int64_t last = first + static_cast<std::int64_t>(src.size()) - 1;
  const std::int64_t reach = std::min(range_, std::max({t1 - first, last - t0, std::int64_t{0}}));
  reserve(reach);
  if (path == ConvPath::Auto) path = (2 * reach + 1 > kFftThreshold) ? ConvPath::Fft : ConvPath::Direct;
  switch (path) {
    case ConvPath::Serial: convolve_serial(src, first, t0, t1, reach, out); break;
    case ConvPath::Fft: {
      // offsets past the window only meet zero padding, so a coarser reach is
      // harmless and lets the cached stencil spectrum survive window growth
      const std::int64_t step = std::max<std::int64_t>(64, reach / 8);
      const std::int64_t fft_reach = std::min(range_, (reach + step - 1) / step * step);
      reserve(fft_reach);
      fft_->convolve(std::span<const double>(weights_.data(), static_cast<std::size_t>(fft_reach + 1)), fft_reach,
                     src, first, t0, t1, out);
      break;
    }
    default: convolve_direct(src, first, t0, t1, reach, out); break;
  }
  if (bounds) add_boundary_correction(src, first, *bounds, t0, t1, reach, out);
}

double NonlocalOperator::boundary_flux(std::span<const double> src, std::int64_t first,
                                       const std::optional<Interval>& bounds, Side side) const {
  const auto s = static_cast<std::int64_t>(src.size());
  if (s == 0) return 0.0;
  const double x_first = static_cast<double>(first) * dx_;
  const double x_last = static_cast<double>(first + s - 1) * dx_;
  const double g = bounds ? bounds->g : x_first;
  const double h = bounds ? bounds->h : x_last;
  // trapezoid node weights; with bounds the end values are 0 at g and h
  auto node_weight = [&](std::int64_t k) {
    const double left = k == 0 ? (bounds ? std::max(0.0, x_first - g) : 0.0) : dx_;
    const double right = k == s - 1 ? (bounds ? std::max(0.0, h - x_last) : 0.0) : dx_;
    return 0.5 * (left + right);
  };
  double sum = 0.0;
  if (side == Side::Right) {
    for (std::int64_t k = s - 1; k >= 0; --k) {
      const double v = src[static_cast<std::size_t>(k)];
      if (v == 0.0) continue;
      const double z = h - static_cast<double>(first + k) * dx_;
      sum += node_weight(k) * kernel_.tail_mass(std::max(0.0, z)) * v;
    }
  } else {
    for (std::int64_t k = 0; k < s; ++k) {
      const double v = src[static_cast<std::size_t>(k)];
      if (v == 0.0) continue;
      const double z = static_cast<double>(first + k) * dx_ - g;
      sum += node_weight(k) * kernel_.tail_mass(std::max(0.0, z)) * v;
    }
  }
  return sum;
}

std::vector<double> convolve(const NonlocalOperator& op, const GridFunction& f, int component, ConvPath path) {
  if (component < 0 || component >= static_cast<int>(f.values.size()))
    throw Error(Errc::InvalidArgument, "component index out of range");
  if (std::abs(f.dx - op.dx()) > 1e-12 * op.dx()) throw Error(Errc::GridMismatch, "grid spacing differs from operator");
  const auto& v = f.values[static_cast<std::size_t>(component)];
  std::vector<double> out(v.size());
  op.convolve(v, f.first_index, f.bounds, f.first_index, f.last_index(), out, path);
  return out;
}

double boundary_flux(const NonlocalOperator& op, const GridFunction& f, int component, Side side) {
  if (component < 0 || component >= static_cast<int>(f.values.size()))
    throw Error(Errc::InvalidArgument, "component index out of range");
  if (std::abs(f.dx - op.dx()) > 1e-12 * op.dx()) throw Error(Errc::GridMismatch, "grid spacing differs from operator");
  return op.boundary_flux(f.values[static_cast<std::size_t>(component)], f.first_index, f.bounds, side);
}

}  // namespace nlfb
