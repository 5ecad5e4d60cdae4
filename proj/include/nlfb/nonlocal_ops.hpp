#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "nlfb/kernels.hpp"

namespace nlfb {

/// Boundary positions of the active window; nodes exactly on g or h count as exterior.
struct Interval {
  double g = 0.0, h = 0.0;
};

/// Per-component samples on a contiguous range of the global lattice x_k = k dx.
/// values[c][n] lives at lattice index first_index + n.
struct GridFunction {
  double dx = 0.0;
  std::int64_t first_index = 0;
  std::vector<std::vector<double>> values;
  /// When set, the function is taken to vanish at g and h and to be linear
  /// between them and the outermost nodes.
  std::optional<Interval> bounds;

  std::size_t size() const { return values.empty() ? 0 : values.front().size(); }
  std::int64_t last_index() const { return first_index + static_cast<std::int64_t>(size()) - 1; }
  double x(std::size_t n) const { return static_cast<double>(first_index + static_cast<std::int64_t>(n)) * dx; }
};

enum class ConvPath { Auto, Direct, Serial, Fft };
enum class Side { Left, Right };

class FftConvolver;

/// Discrete convolution with a fixed kernel on a fixed lattice spacing.
///
/// Weights are W_o = int J(o dx + s) (1 - |s|/dx) ds over |s| < dx, i.e. the
/// kernel integrated against the hat function of node o, so the trapezoid
/// rule for piecewise-linear data is exact and sum_o W_o = 1 up to the
/// truncated tail mass. The weight table grows on demand for heavy tails.
///
/// One operator must not be used from several threads at once; build one per
/// simulation. The kernel is copied.
class NonlocalOperator {
 public:
  static constexpr std::int64_t kFftThreshold = 512;

  /// Error{MeshTooCoarse} when dx > kernel.core_scale() / 4.
  NonlocalOperator(const Kernel& kernel, double dx);
  ~NonlocalOperator();
  NonlocalOperator(NonlocalOperator&&) noexcept;
  NonlocalOperator& operator=(NonlocalOperator&&) noexcept;

  const Kernel& kernel() const noexcept { return kernel_; }
  double dx() const noexcept { return dx_; }
  /// Largest offset with a nonzero weight inside the cutoff radius.
  std::int64_t range() const noexcept { return range_; }

  double weight(std::int64_t offset) const;
  /// sum_{o >= n} W_o for n >= 0, from the tail function (no truncation).
  double weight_tail(std::int64_t n) const;
  /// Make weights up to this offset available.
  void reserve(std::int64_t max_offset) const;

  /// Trapezoid approximation of int J(x_j - y) f(y) dy at target lattice
  /// nodes t0..t1 (inclusive). src holds values at lattice indices
  /// first, first+1, ...; the function is zero outside them.
  void convolve(std::span<const double> src, std::int64_t first, const std::optional<Interval>& bounds,
                std::int64_t t0, std::int64_t t1, std::span<double> out, ConvPath path = ConvPath::Auto) const;

  /// int_g^h tail(h - x) f(x) dx (right) or int_g^h tail(x - g) f(x) dx (left).
  /// Without bounds, g and h are the outermost nodes and f is used as given there.
  double boundary_flux(std::span<const double> src, std::int64_t first, const std::optional<Interval>& bounds,
                       Side side) const;

 private:
  void convolve_direct(std::span<const double> src, std::int64_t first, std::int64_t t0, std::int64_t t1,
                       std::int64_t reach, std::span<double> out) const;
  void convolve_serial(std::span<const double> src, std::int64_t first, std::int64_t t0, std::int64_t t1,
                       std::int64_t reach, std::span<double> out) const;
  void add_boundary_correction(std::span<const double> src, std::int64_t first, const Interval& bounds,
                               std::int64_t t0, std::int64_t t1, std::int64_t reach, std::span<double> out) const;
  double compute_weight(std::int64_t offset) const;

  Kernel kernel_;
  double dx_;
  std::int64_t range_;
  mutable std::vector<double> weights_;
  mutable std::unique_ptr<std::mutex> grow_mutex_;
  mutable std::unique_ptr<FftConvolver> fft_;
};

/// Convolution of one component over the function's own node range.
std::vector<double> convolve(const NonlocalOperator& op, const GridFunction& f, int component,
                             ConvPath path = ConvPath::Auto);

/// Flux through one side; uses f.bounds when set, otherwise the outermost nodes as g and h.
double boundary_flux(const NonlocalOperator& op, const GridFunction& f, int component, Side side);

}  // namespace nlfb
