#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "nlfb/fb_sim.hpp"

namespace nlfb {

struct LevelSpec {
  int component = 0;
  double lambda = 0.0;
};

struct CauchyConfig {
  ReactionModel model;
  std::vector<Kernel> kernels;
  /// Initial data is supported in [-h0, h0]; same defaults as the free boundary problem.
  double h0 = 1.0;
  std::vector<Profile> initial;
  std::vector<double> amplitude;
  double dx = 0.1;
  double dt = 0.05;
  double t_end = 10.0;
  std::vector<double> snapshot_times;
  std::vector<LevelSpec> levels;
  int sample_stride = 1;
  /// Edge smallness: max over the outer edge_fraction of nodes below
  /// eps_edge_factor * min_i u*_i, else grow by growth_block nodes.
  double eps_edge_factor = 1e-8;
  double edge_fraction = 0.05;
  int growth_block = 64;
  /// Hard cap on the half-width; heavy tails would otherwise grow without bound.
  double max_half_width = kInfinite;
  ConvPath conv_path = ConvPath::Auto;
};

struct CauchyState {
  double t = 0.0;
  /// Window [-X_left, X_right] is the node range of u; u vanishes outside.
  GridFunction u;
  double left() const { return u.x(0); }
  double right() const { return u.x(u.size() - 1); }
};

struct LevelSample {
  double t = 0.0;
  int component = 0;
  double lambda = 0.0;
  std::optional<double> x_minus, x_plus;
};

struct CauchySeries {
  std::vector<LevelSample> levels;
  std::vector<Snapshot> snapshots;
  /// (t, left edge, right edge) per sample.
  std::vector<std::array<double, 3>> windows;
  /// Largest bound tail(X/2) * max U on the mass neglected by the window, seen
  /// from the central half of the window.
  double max_leak = 0.0;
  bool capped = false;
  double stability_bound = 0.0;
};

class CauchySimulator {
 public:
  explicit CauchySimulator(CauchyConfig cfg);

  const CauchyConfig& config() const noexcept { return cfg_; }
  double stability_bound() const noexcept { return stability_bound_; }
  double eps_edge() const noexcept { return eps_edge_; }

  CauchyState initial_state() const;
  /// One explicit step, then window growth where the edges are not small.
  void step(CauchyState& state, double dt);
  CauchySeries run();

  /// Bound on the exterior contribution missed at the central half of the window.
  double leak_bound(const CauchyState& state) const;
  bool capped() const noexcept { return capped_; }

 private:
  void grow(CauchyState& s);

  CauchyConfig cfg_;
  std::vector<NonlocalOperator> ops_;
  State u_star_;
  double stability_bound_ = 0.0;
  double eps_edge_ = 0.0;
  std::int64_t max_nodes_side_ = 0;
  bool capped_ = false;
};

CauchySeries run(const CauchyConfig& cfg);

/// Outermost crossings of u_i through lambda by linear interpolation;
/// nullopt when u_i < lambda everywhere. Error{InvalidLevel} unless 0 < lambda < u_star_i.
std::optional<std::pair<double, double>> level_set(const GridFunction& u, int i, double lambda, double u_star_i);

}  // namespace nlfb
