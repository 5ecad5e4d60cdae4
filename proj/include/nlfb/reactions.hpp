#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nlfb {

using State = std::vector<double>;

/// Row-major m x m matrix.
struct Matrix {
  int n = 0;
  std::vector<double> a;

  Matrix() = default;
  explicit Matrix(int size) : n(size), a(static_cast<size_t>(size * size), 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }
};

/// Cooperative reaction term F: R^m_+ -> R^m together with the per-component
/// diffusion rates and the invariant box [0, u_ceiling].
class ReactionModel {
 public:
  using RateFn = std::function<void(std::span<const double> u, std::span<double> out)>;
  using JacFn = std::function<void(std::span<const double> u, Matrix& out)>;

  ReactionModel(std::string name, int m, int m0, std::vector<double> diffusion, RateFn rates, JacFn jacobian,
                std::optional<State> ceiling, std::map<std::string, double> params);

  const std::string& name() const noexcept { return name_; }
  int m() const noexcept { return m_; }
  int m0() const noexcept { return m0_; }
  const std::vector<double>& diffusion() const noexcept { return diffusion_; }
  double max_diffusion() const;
  const std::optional<State>& ceiling() const noexcept { return ceiling_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jac_); }

  /// Unchecked evaluation for inner loops.
  void rates(std::span<const double> u, std::span<double> out) const { rates_(u, out); }
  void jacobian_unchecked(std::span<const double> u, Matrix& out) const;

  /// Cached u*, or nullopt when the model has no positive equilibrium.
  const std::optional<State>& u_star() const noexcept { return u_star_; }
  const std::string& equilibrium_failure() const noexcept { return equilibrium_failure_; }

  /// Componentwise ceiling or +inf.
  double ceiling_or_inf(int i) const;
  /// Sampling box: [0, u_ceiling] when bounded, otherwise [0, 2 u*].
  State sampling_box() const;

 private:
  friend ReactionModel finalize(ReactionModel model, std::optional<std::string> threshold_failure);

  std::string name_;
  int m_ = 0, m0_ = 0;
  std::vector<double> diffusion_;
  RateFn rates_;
  JacFn jac_;
  std::optional<State> ceiling_;
  std::map<std::string, double> params_;
  std::optional<State> u_star_;
  std::string equilibrium_failure_;
};

struct WnvParams {
  double a1 = 1, a2 = 1, b1 = 0.5, b2 = 0.5, e1 = 1, e2 = 1;
};
struct CholeraParams {
  double a = 1, b = 1, c = 1, alpha = 2, beta = 3;
};
struct ConcaveParams {
  double a = 1, b = 1, alpha = 2, beta = 2;
};

/// f1 = a1 (e1 - u1) u2 - b1 u1, f2 = a2 (e2 - u2) u1 - b2 u2; ceiling (e1, e2).
ReactionModel make_wnv(const WnvParams& p, std::vector<double> diffusion = {1.0, 1.0});
/// f1 = -a u1 + c u2, f2 = -b u2 + alpha u1 / (1 + beta u1).
ReactionModel make_cholera(const CholeraParams& p, std::vector<double> diffusion = {1.0, 1.0});
/// f1 = -a u1 + alpha u2 / (1 + u2), f2 = -b u2 + beta ln(1 + u1).
ReactionModel make_concave(const ConcaveParams& p, std::vector<double> diffusion = {1.0, 1.0});
/// User-supplied rates in the expression grammar of Expr; Jacobian by central differences.
ReactionModel make_custom(int m, int m0, const std::vector<std::string>& f, const std::map<std::string, double>& params,
                          std::vector<double> diffusion, std::optional<State> ceiling = std::nullopt);

/// Checked evaluation: Error{OutOfCone} / Error{AboveCeiling}.
State eval_F(const ReactionModel& model, std::span<const double> u);
Matrix jacobian(const ReactionModel& model, std::span<const double> u);
/// Central-difference Jacobian, step 1e-6 * max(1, |u_j|).
Matrix finite_difference_jacobian(const ReactionModel& model, std::span<const double> u);

/// u* with ||F(u*)||_inf < 1e-12 max(1, ||u*||); Error{NoPositiveRoot} otherwise.
State positive_equilibrium(const ReactionModel& model);

/// Newton multi-start search without the cached result; exposed for the assumption checker.
std::optional<State> newton_positive_root(const ReactionModel& model, std::span<const State> seeds);

/// Dominant (largest real part) eigenvalue of a Metzler matrix by power iteration
/// on A + sI.
double principal_eigenvalue(const Matrix& a);
bool is_irreducible(const Matrix& a);

/// 1.5 x sampled maximum of ||grad F||_inf over the sampling box.
double lipschitz_bound(const ReactionModel& model, int n_samples = 256, std::uint64_t seed = 7);

enum class CheckStatus { Pass, Fail, NotChecked };
std::string to_string(CheckStatus s);

struct AssumptionCheck {
  std::string name;
  CheckStatus status = CheckStatus::NotChecked;
  std::optional<State> witness;
  std::string detail;
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;

  const AssumptionCheck& at(const std::string& name) const;
  /// Names of checks that failed.
  std::vector<std::string> failures() const;
};

/// Sampled checks of (f1)-(f6); (f4) and (f5) are dynamical and come back NotChecked.
AssumptionReport verify_assumptions(const ReactionModel& model, int n_samples, std::uint64_t seed);

/// Latin-hypercube points in the box [0, upper].
std::vector<State> stratified_samples(const State& upper, int n, std::uint64_t seed);

}  // namespace nlfb
