#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nlfb/kernels.hpp"
#include "nlfb/reactions.hpp"

namespace nlfb {

struct SemiWaveOptions {
  /// Mesh spacing on [-L, 0]; adjusted down so that L/dx is an integer.
  double dx = 0.1;
  /// Pseudo-time iteration budget per profile solve.
  long max_iter = 400000;
  /// Existence proxy: phi_i(-L/2) >= proxy_fraction * u*_i for every i.
  double proxy_fraction = 0.5;
  /// Relative bisection tolerance of the C* threshold search.
  double cstar_rel_tol = 5e-3;
  /// Bracket expansion budget of find_c0.
  int max_doublings = 60;
};

struct SemiWaveSolution {
  double c = 0.0;
  double L = 0.0;
  double dx = 0.0;
  std::vector<double> x;
  /// phi[i][k] at x[k]; phi(-L) = u*, phi(0) = 0.
  std::vector<std::vector<double>> phi;
  /// Sup-norm of the discrete steady-state residual.
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  /// Every component nonincreasing to within 1e-8.
  bool monotone = false;
  State u_star;
  std::vector<Kernel> kernels;

  /// phi_i at -L/2 relative to u*_i, minimized over components.
  double mid_fraction() const;
  /// Position where phi_i first drops to u*_i / 2 (scanning from -L).
  double half_level_position(int i) const;
};

/// Steady state of the pseudo-time relaxation on [-L, 0] with phi = u* left
/// of -L and phi = 0 right of 0. The speed term uses the upwind difference
/// (phi_{k+1} - phi_k)/dx. Starts from `start` when given (it must be a
/// supersolution for monotone convergence), else from phi = u* on [-L, 0).
/// Error{NoConvergence} when the budget runs out before the update drops below tol * dtau.
SemiWaveSolution solve_profile(double c, const ReactionModel& model, const std::vector<Kernel>& kernels, double L,
                               double tol, const SemiWaveOptions& opts = {}, const SemiWaveSolution* start = nullptr);

/// sum_i mu_i int_{-L}^0 phi_i(x) tail_i(-x) dx by the trapezoid rule.
double flux_functional(const SemiWaveSolution& sol, std::span<const double> mu);

struct TracePoint {
  double c = 0.0;
  double G = 0.0;
};

struct C0Result {
  double c0 = 0.0;
  SemiWaveSolution sol;
  std::vector<TracePoint> trace;
  /// G changed sign exactly once across the ordered trace.
  bool single_sign_change = true;
};

/// Root of G(c) = flux_functional(profile(c)) - c by doubling then bisection.
/// Error{J1Violated} when a kernel with mu_i > 0 has an infinite first moment;
/// Error{BracketNotFound} when the doubling budget runs out.
C0Result find_c0(const ReactionModel& model, const std::vector<Kernel>& kernels, std::span<const double> mu, double L,
                 double tol_c, const SemiWaveOptions& opts = {});

struct ProxyProbe {
  double c = 0.0;
  double L = 0.0;
  double mid_fraction = 0.0;
  bool exists = false;
};

struct CStarResult {
  /// kInfinite when a diffusing kernel fails (J2).
  double cstar = kInfinite;
  std::string reason;
  /// min over lambda of s(lambda)/lambda; diagnostic only.
  std::optional<double> linearized;
  /// Final bracketing pair (exists, does not exist).
  std::optional<std::pair<double, double>> bracket;
  std::vector<ProxyProbe> probes;
};

/// Threshold search for the minimal traveling-wave speed. Empty c_grid means a
/// grid spread around the linearized value. Error{ThresholdNotBracketed} when
/// the proxy does not change across the grid.
CStarResult estimate_cstar(const ReactionModel& model, const std::vector<Kernel>& kernels,
                           std::span<const double> L_schedule, std::span<const double> c_grid,
                           const SemiWaveOptions& opts = {});

/// min_{0 < lambda < lambda_max} s(lambda) / lambda with s the principal eigenvalue of
/// diag(d_i (int J_i(y) e^{-lambda y} dy - 1)) + grad F(0).
double linearized_speed(const ReactionModel& model, const std::vector<Kernel>& kernels);

}  // namespace nlfb
