#include "nlfb/fb_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfb/errors.hpp"

namespace nlfb {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Spreading: return "Spreading";
    case Outcome::Vanishing: return "Vanishing";
    case Outcome::Undetermined: return "Undetermined";
  }
  return "?";
}

double stability_bound(const ReactionModel& model) { return 0.5 / (model.max_diffusion() + lipschitz_bound(model)); }

std::pair<std::int64_t, std::int64_t> active_range(double g, double h, double dx) {
  return {static_cast<std::int64_t>(std::ceil(g / dx)), static_cast<std::int64_t>(std::floor(h / dx))};
}

FBSimulator::FBSimulator(FBConfig cfg) : cfg_(std::move(cfg)) {
  const ReactionModel& model = cfg_.model;
  const int m0 = model.m0();
  if (static_cast<int>(cfg_.kernels.size()) != m0)
    throw Error(Errc::InvalidArgument, "need one kernel per diffusing component");
  if (static_cast<int>(cfg_.mu.size()) != m0) throw Error(Errc::InvalidArgument, "need one mu per diffusing component");
  double mu_sum = 0.0;
  for (double v : cfg_.mu) {
    if (!(v >= 0.0)) throw Error(Errc::InvalidArgument, "mu must be nonnegative");
    mu_sum += v;
  }
  if (!(mu_sum > 0.0)) throw Error(Errc::InvalidArgument, "sum of mu must be positive");
  if (!(cfg_.h0 > 0.0)) throw Error(Errc::InvalidArgument, "h0 must be positive");
  if (!(cfg_.dt > 0.0) || !(cfg_.t_end >= 0.0)) throw Error(Errc::InvalidArgument, "need dt > 0 and t_end >= 0");
  if (cfg_.sample_stride < 1) throw Error(Errc::InvalidArgument, "sample_stride must be >= 1");
  if (!cfg_.initial.empty() && static_cast<int>(cfg_.initial.size()) != model.m())
    throw Error(Errc::InvalidArgument, "need one initial profile per component");
  if (!cfg_.amplitude.empty() && static_cast<int>(cfg_.amplitude.size()) != model.m())
    throw Error(Errc::InvalidArgument, "need one amplitude per component");
  u_star_ = positive_equilibrium(model);
  ops_.reserve(static_cast<size_t>(m0));
  for (const Kernel& k : cfg_.kernels) ops_.emplace_back(k, cfg_.dx);
  stability_bound_ = nlfb::stability_bound(model);
  std::sort(cfg_.snapshot_times.begin(), cfg_.snapshot_times.end());
}

FBState FBSimulator::initial_state() const {
  const int m = cfg_.model.m();
  FBState s;
  s.g = -cfg_.h0;
  s.h = cfg_.h0;
  const auto [k0, k1] = active_range(s.g, s.h, cfg_.dx);
  s.u.dx = cfg_.dx;
  s.u.first_index = k0;
  s.u.bounds = Interval{s.g, s.h};
  s.u.values.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(k1 - k0 + 1), 0.0));
  for (int i = 0; i < m; ++i) {
    const double amp = cfg_.amplitude.empty() ? 0.5 * u_star_[i] : cfg_.amplitude[i];
    for (std::int64_t k = k0; k <= k1; ++k) {
      const double x = static_cast<double>(k) * cfg_.dx;
      double v = 0.0;
      if (x > s.g && x < s.h) v = cfg_.initial.empty() ? amp * (1.0 - std::abs(x) / cfg_.h0) : cfg_.initial[i](x);
      if (!(v >= 0.0) || v > cfg_.model.ceiling_or_inf(i))
        throw Error(Errc::InvalidArgument, "initial profile leaves [0, u_ceiling]");
      s.u.values[i][static_cast<size_t>(k - k0)] = v;
    }
  }
  return s;
}

void FBSimulator::boundary_speeds(const FBState& s, double& hp, double& gp) const {
  hp = 0.0;
  gp = 0.0;
  for (size_t i = 0; i < ops_.size(); ++i) {
    if (cfg_.mu[i] == 0.0) continue;
    const auto& v = s.u.values[i];
    hp += cfg_.mu[i] * ops_[i].boundary_flux(v, s.u.first_index, Interval{s.g, s.h}, Side::Right);
    gp -= cfg_.mu[i] * ops_[i].boundary_flux(v, s.u.first_index, Interval{s.g, s.h}, Side::Left);
  }
}

void FBSimulator::rhs(const FBState& s, std::int64_t t0, std::int64_t t1, std::vector<std::vector<double>>& du) {
  const ReactionModel& model = cfg_.model;
  const int m = model.m();
  const auto n = static_cast<size_t>(t1 - t0 + 1);
  du.assign(static_cast<size_t>(m), std::vector<double>(n, 0.0));
  const std::int64_t first = s.u.first_index, last = s.u.last_index();
  for (int i = 0; i < model.m0(); ++i)
    ops_[i].convolve(s.u.values[i], first, Interval{s.g, s.h}, t0, t1, du[i], cfg_.conv_path);
  State u(static_cast<size_t>(m)), f(static_cast<size_t>(m));
  for (size_t p = 0; p < n; ++p) {
    const std::int64_t k = t0 + static_cast<std::int64_t>(p);
    const bool inside = k >= first && k <= last;
    for (int i = 0; i < m; ++i) u[i] = inside ? s.u.values[i][static_cast<size_t>(k - first)] : 0.0;
    model.rates(u, f);
    for (int i = 0; i < m; ++i) {
      const double d = model.diffusion()[i];
      du[i][p] = (i < model.m0() ? d * (du[i][p] - u[i]) : 0.0) + f[i];
    }
  }
}

void FBSimulator::finish(FBState& s, std::int64_t t0, std::int64_t t1, std::vector<std::vector<double>>&& values) const {
  const int m = cfg_.model.m();
  for (int i = 0; i < m; ++i) {
    auto& v = values[i];
    const double cap = cfg_.model.ceiling_or_inf(i) + 1e-9;
    for (std::int64_t k = t0; k <= t1; ++k) {
      double& x = v[static_cast<size_t>(k - t0)];
      const double pos = static_cast<double>(k) * cfg_.dx;
      if (pos <= s.g || pos >= s.h) {
        x = 0.0;
        continue;
      }
      if (!std::isfinite(x) || x < -1e-12 || x > cap) {
        std::ostringstream msg;
        msg << "component " << i + 1 << " at x=" << pos << " has value " << x << " at t=" << s.t
            << " (dt may exceed the stability bound " << stability_bound_ << ")";
        throw InstabilityError(s.t, msg.str());
      }
      if (x < 0.0) x = 0.0;
    }
  }
  s.u.first_index = t0;
  s.u.values = std::move(values);
  s.u.bounds = Interval{s.g, s.h};
}

void FBSimulator::step(FBState& s, double dt) {
  const int m = cfg_.model.m();
  double hp = 0.0, gp = 0.0;
  boundary_speeds(s, hp, gp);
  std::vector<std::vector<double>> k1, k2;

  if (!cfg_.heun) {
    const double h_new = s.h + dt * hp, g_new = s.g + dt * gp;
    const auto [t0, t1] = active_range(g_new, h_new, cfg_.dx);
    rhs(s, t0, t1, k1);
    const std::int64_t first = s.u.first_index, last = s.u.last_index();
    for (int i = 0; i < m; ++i)
      for (std::int64_t k = t0; k <= t1; ++k) {
        const double old = (k >= first && k <= last) ? s.u.values[i][static_cast<size_t>(k - first)] : 0.0;
        k1[i][static_cast<size_t>(k - t0)] = old + dt * k1[i][static_cast<size_t>(k - t0)];
      }
    s.t += dt;
    s.h = h_new;
    s.g = g_new;
    finish(s, t0, t1, std::move(k1));
    return;
  }

  // Heun: predictor by Euler, corrector averages the two slopes
  FBState pred = s;
  {
    const double hpred = s.h + dt * hp, gpred = s.g + dt * gp;
    const auto [p0, p1] = active_range(gpred, hpred, cfg_.dx);
    rhs(s, p0, p1, k1);
    const std::int64_t first = s.u.first_index, last = s.u.last_index();
    std::vector<std::vector<double>> vals(k1);
    for (int i = 0; i < m; ++i)
      for (std::int64_t k = p0; k <= p1; ++k) {
        const double old = (k >= first && k <= last) ? s.u.values[i][static_cast<size_t>(k - first)] : 0.0;
        vals[i][static_cast<size_t>(k - p0)] = old + dt * k1[i][static_cast<size_t>(k - p0)];
      }
    pred.t = s.t + dt;
    pred.h = hpred;
    pred.g = gpred;
    finish(pred, p0, p1, std::move(vals));
  }
  double hp2 = 0.0, gp2 = 0.0;
  boundary_speeds(pred, hp2, gp2);
  const double h_new = s.h + 0.5 * dt * (hp + hp2), g_new = s.g + 0.5 * dt * (gp + gp2);
  const auto [t0, t1] = active_range(g_new, h_new, cfg_.dx);
  rhs(s, t0, t1, k1);
  rhs(pred, t0, t1, k2);
  const std::int64_t first = s.u.first_index, last = s.u.last_index();
  for (int i = 0; i < m; ++i)
    for (std::int64_t k = t0; k <= t1; ++k) {
      const auto p = static_cast<size_t>(k - t0);
      const double old = (k >= first && k <= last) ? s.u.values[i][static_cast<size_t>(k - first)] : 0.0;
      k1[i][p] = old + 0.5 * dt * (k1[i][p] + k2[i][p]);
    }
  s.t += dt;
  s.h = h_new;
  s.g = g_new;
  finish(s, t0, t1, std::move(k1));
}

FrontSample FBSimulator::sample(const FBState& s) const {
  FrontSample out{s.t, s.g, s.h, 0.0, kInfinite};
  const size_t n = s.u.size();
  for (size_t p = 0; p < n; ++p) {
    double sum = 0.0;
    for (const auto& v : s.u.values) sum += v[p];
    out.max_sum = std::max(out.max_sum, sum);
    if (std::abs(s.u.x(p)) <= cfg_.h0) out.core_min_sum = std::min(out.core_min_sum, sum);
  }
  if (!std::isfinite(out.core_min_sum)) out.core_min_sum = 0.0;
  return out;
}

FrontSeries FBSimulator::run() {
  FrontSeries series;
  series.stability_bound = stability_bound_;
  FBState s = initial_state();
  series.samples.push_back(sample(s));
  size_t next_snap = 0;
  auto take_snapshots = [&]() {
    while (next_snap < cfg_.snapshot_times.size() && cfg_.snapshot_times[next_snap] <= s.t + 1e-12) {
      if (cfg_.snapshot_times[next_snap] >= s.t - 1e-12) series.snapshots.push_back({s.t, s.u});
      ++next_snap;
    }
  };
  take_snapshots();
  long steps = 0;
  while (s.t < cfg_.t_end) {
    double target = cfg_.t_end;
    if (next_snap < cfg_.snapshot_times.size()) target = std::min(target, cfg_.snapshot_times[next_snap]);
    double dt = cfg_.dt;
    bool land = false;
    if (s.t + dt >= target - 1e-9 * cfg_.dt) {
      dt = target - s.t;
      land = true;
    }
    step(s, dt);
    if (land) s.t = target;
    ++steps;
    const bool at_end = s.t >= cfg_.t_end;
    if (steps % cfg_.sample_stride == 0 || at_end) series.samples.push_back(sample(s));
    take_snapshots();
  }
  return series;
}

FrontSeries run(const FBConfig& cfg) {
  FBSimulator sim(cfg);
  return sim.run();
}

Outcome classify_outcome(const FrontSeries& series, const FBConfig& cfg) {
  const auto& smp = series.samples;
  if (smp.size() < 2) return Outcome::Undetermined;
  const double t_last = smp.back().t;
  if (t_last < 0.2 * cfg.t_end || !(t_last > 0.0)) return Outcome::Undetermined;
  const auto& th = cfg.thresholds;
  const State us = positive_equilibrium(cfg.model);
  double us_sum = 0.0;
  for (double v : us) us_sum += v;

  const double w_start = t_last * (1.0 - th.final_window);
  size_t first_w = 0;
  while (first_w + 1 < smp.size() && smp[first_w].t < w_start) ++first_w;
  double core_min = kInfinite, max_sum = 0.0;
  for (size_t i = first_w; i < smp.size(); ++i) {
    core_min = std::min(core_min, smp[i].core_min_sum);
    max_sum = std::max(max_sum, smp[i].max_sum);
  }
  const double width0 = smp.front().h - smp.front().g;
  const double width_end = smp.back().h - smp.back().g;
  if (width_end - width0 > th.growth_factor * cfg.h0 && core_min > th.spread_fraction * us_sum)
    return Outcome::Spreading;
  const double late_growth = width_end - (smp[first_w].h - smp[first_w].g);
  const bool decreasing = smp.back().max_sum < smp[first_w].max_sum;
  if (late_growth < th.vanish_increment * cfg.h0 && max_sum < th.vanish_fraction * us_sum && decreasing)
    return Outcome::Vanishing;
  return Outcome::Undetermined;
}

}  // namespace nlfb
