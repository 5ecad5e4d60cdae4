#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nlfb/kernels.hpp"
#include "nlfb/nonlocal_ops.hpp"
#include "nlfb/reactions.hpp"

namespace nlfb {

/// Finite-horizon spreading/vanishing classifier thresholds.
struct OutcomeThresholds {
  /// Spreading needs h - g to grow by more than growth_factor * h0.
  double growth_factor = 10.0;
  /// ... and min over [-h0, h0] of sum_i u_i above spread_fraction * sum_i u*_i.
  double spread_fraction = 0.5;
  /// Vanishing needs max sum_i u_i below vanish_fraction * sum_i u*_i ...
  double vanish_fraction = 1e-3;
  /// ... and h - g to grow by less than vanish_increment * h0 over the final window.
  double vanish_increment = 1e-4;
  /// Fraction of the horizon forming the final window.
  double final_window = 0.25;
};

using Profile = std::function<double(double x)>;

struct FBConfig {
  ReactionModel model;
  /// One kernel per diffusing component.
  std::vector<Kernel> kernels;
  /// Expansion coefficients for the diffusing components.
  std::vector<double> mu;
  double h0 = 1.0;
  /// Per-component initial data on [-h0, h0]; empty means the default tent
  /// amplitude_i (1 - |x| / h0).
  std::vector<Profile> initial;
  /// Tent amplitudes; empty means u*_i / 2.
  std::vector<double> amplitude;
  double dx = 0.1;
  double dt = 0.05;
  double t_end = 10.0;
  std::vector<double> snapshot_times;
  int sample_stride = 1;
  bool heun = false;
  OutcomeThresholds thresholds;
  ConvPath conv_path = ConvPath::Auto;
};

struct FBState {
  double t = 0.0;
  double g = 0.0, h = 0.0;
  /// Active lattice nodes ceil(g/dx) .. floor(h/dx); u.bounds = {g, h}.
  GridFunction u;
};

struct FrontSample {
  double t = 0.0, g = 0.0, h = 0.0;
  /// max over nodes of sum_i u_i.
  double max_sum = 0.0;
  /// min over nodes with |x| <= h0 of sum_i u_i.
  double core_min_sum = 0.0;
};

struct Snapshot {
  double t = 0.0;
  GridFunction u;
};

struct FrontSeries {
  std::vector<FrontSample> samples;
  std::vector<Snapshot> snapshots;
  double stability_bound = 0.0;
};

enum class Outcome { Spreading, Vanishing, Undetermined };
std::string to_string(Outcome o);

/// 0.5 / (max_i d_i + L_F).
double stability_bound(const ReactionModel& model);

/// Explicit stepper for the free boundary system. Builds one convolution
/// operator per diffusing component.
class FBSimulator {
 public:
  /// Validates the configuration (Error{InvalidArgument} / Error{MeshTooCoarse}).
  explicit FBSimulator(FBConfig cfg);

  const FBConfig& config() const noexcept { return cfg_; }
  double stability_bound() const noexcept { return stability_bound_; }

  FBState initial_state() const;
  /// One step of size dt; InstabilityError on loss of positivity/confinement.
  void step(FBState& state, double dt);
  /// Drives the stepper to t_end, landing exactly on snapshot times.
  FrontSeries run();

  FrontSample sample(const FBState& state) const;

 private:
  /// Boundary speeds at the state.
  void boundary_speeds(const FBState& s, double& hp, double& gp) const;
  /// du/dt on lattice nodes t0..t1, u zero-extended outside its range.
  void rhs(const FBState& s, std::int64_t t0, std::int64_t t1, std::vector<std::vector<double>>& du);
  void finish(FBState& s, std::int64_t t0, std::int64_t t1, std::vector<std::vector<double>>&& values) const;

  FBConfig cfg_;
  std::vector<NonlocalOperator> ops_;
  double stability_bound_ = 0.0;
  State u_star_;
};

FrontSeries run(const FBConfig& cfg);

/// Spreading / Vanishing / Undetermined from the sampled trajectory.
Outcome classify_outcome(const FrontSeries& series, const FBConfig& cfg);

/// Active lattice range for boundaries g <= h.
std::pair<std::int64_t, std::int64_t> active_range(double g, double h, double dx);

}  // namespace nlfb
