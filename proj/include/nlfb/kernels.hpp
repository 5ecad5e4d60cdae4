#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nlfb {

inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// J(x) = 1/(2r) on [-r, r].
struct UniformSpec {
  double radius = 1.0;
};
/// J(x) = exp(-|x|/s) / (2s).
struct LaplaceSpec {
  double scale = 1.0;
};
/// Centered normal density with standard deviation sigma.
struct GaussianSpec {
  double sigma = 1.0;
};
/// J(x) = C (w + |x|)^(-gamma); w is the core width.
struct PowerLawSpec {
  double gamma = 2.0;
  double core_width = 1.0;
};
/// Piecewise-linear density through the samples, zero outside them.
/// The grid must be symmetric about 0 and the values even.
struct TableSpec {
  std::vector<double> x;
  std::vector<double> values;
};

using KernelSpec = std::variant<UniformSpec, LaplaceSpec, GaussianSpec, PowerLawSpec, TableSpec>;

std::string family_name(const KernelSpec& spec);

struct ClassReport {
  bool satisfies_j1 = false;
  bool satisfies_j2 = false;
  std::optional<double> gamma_hat;
  double gamma_stderr = 0.0;
};

/// Normalized even dispersal kernel with a cached tail function
///   tail(z) = int_z^inf J(y) dy
/// sampled on a geometric mesh (ratio 1.05). Immutable after construction.
class Kernel {
 public:
  static constexpr double kDefaultEpsTail = 1e-8;
  static constexpr double kMeshRatio = 1.05;

  const KernelSpec& spec() const noexcept { return spec_; }
  std::string family() const { return family_name(spec_); }

  double normalizer() const noexcept { return normalizer_; }
  double eps_tail() const noexcept { return eps_tail_; }

  /// J(x).
  double density(double x) const;
  /// Interpolated tail mass; exact 0 beyond the support of compact kernels.
  double tail_mass(double z) const;

  /// Smallest mesh point with tail < eps_tail, or the support radius when compact.
  double cutoff_radius() const noexcept { return cutoff_; }
  bool compact() const noexcept { return compact_; }
  /// Width of the kernel core; meshes coarser than a quarter of it undersample J.
  double core_scale() const noexcept { return core_scale_; }
  /// 2 * tail(cutoff): mass neglected when the kernel is truncated at the cutoff.
  double mass_deficit() const noexcept { return mass_deficit_; }

  /// Nonnegative abscissae where J is not smooth (kinks, support ends, table nodes).
  std::span<const double> breakpoints() const noexcept { return breakpoints_; }

  std::span<const double> tail_nodes() const noexcept { return tail_z_; }
  std::span<const double> tail_values() const noexcept { return tail_v_; }

 private:
  friend Kernel make_kernel(const KernelSpec& spec, double eps_tail);
  double exact_tail(double z) const;

  KernelSpec spec_;
  double normalizer_ = 1.0;
  double eps_tail_ = kDefaultEpsTail;
  double cutoff_ = 0.0;
  double core_scale_ = 1.0;
  double mass_deficit_ = 0.0;
  bool compact_ = false;
  std::vector<double> breakpoints_;
  std::vector<double> tail_z_, tail_v_, tail_j_;
  // positive half of a table kernel (normalized)
  std::vector<double> half_x_, half_v_;
};

/// Throws Error{NonNormalizable} for powerlaw gamma <= 1, Error{NegativeTableValue}
/// for a table with a negative sample.
Kernel make_kernel(const KernelSpec& spec, double eps_tail = Kernel::kDefaultEpsTail);

inline double tail_mass(const Kernel& kernel, double z) { return kernel.tail_mass(z); }

/// int_0^inf x J(x) dx, or kInfinite.
double first_moment(const Kernel& kernel);

/// int_0^inf exp(lambda x) J(x) dx for lambda > 0, or kInfinite.
double exp_moment(const Kernel& kernel, double lambda);

/// int_0^inf exp(lambda x) J(x) dx for any real lambda (kInfinite past the abscissa).
double half_laplace(const Kernel& kernel, double lambda);

/// int_R J(y) exp(lambda y) dy.
double two_sided_mgf(const Kernel& kernel, double lambda);

/// Supremum of lambda with a finite exponential moment (0 for polynomial tails).
double mgf_abscissa(const Kernel& kernel);

ClassReport classify(const Kernel& kernel);

}  // namespace nlfb
