#include "nlfb/cauchy_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfb/errors.hpp"

namespace nlfb {

CauchySimulator::CauchySimulator(CauchyConfig cfg) : cfg_(std::move(cfg)) {
  const ReactionModel& model = cfg_.model;
  if (static_cast<int>(cfg_.kernels.size()) != model.m0())
    throw Error(Errc::InvalidArgument, "need one kernel per diffusing component");
  if (!(cfg_.h0 > 0.0)) throw Error(Errc::InvalidArgument, "h0 must be positive");
  if (!(cfg_.dt > 0.0) || !(cfg_.t_end >= 0.0)) throw Error(Errc::InvalidArgument, "need dt > 0 and t_end >= 0");
  if (cfg_.sample_stride < 1 || cfg_.growth_block < 1) throw Error(Errc::InvalidArgument, "stride and block must be >= 1");
  if (!cfg_.initial.empty() && static_cast<int>(cfg_.initial.size()) != model.m())
    throw Error(Errc::InvalidArgument, "need one initial profile per component");
  if (!cfg_.amplitude.empty() && static_cast<int>(cfg_.amplitude.size()) != model.m())
    throw Error(Errc::InvalidArgument, "need one amplitude per component");
  u_star_ = positive_equilibrium(model);
  for (const auto& lv : cfg_.levels) {
    if (lv.component < 0 || lv.component >= model.m()) throw Error(Errc::InvalidArgument, "level component out of range");
    if (!(lv.lambda > 0.0 && lv.lambda < u_star_[lv.component]))
      throw Error(Errc::InvalidLevel, "level must lie in (0, u*_i)");
  }
  for (const Kernel& k : cfg_.kernels) ops_.emplace_back(k, cfg_.dx);
  stability_bound_ = nlfb::stability_bound(model);
  eps_edge_ = cfg_.eps_edge_factor * *std::min_element(u_star_.begin(), u_star_.end());
  max_nodes_side_ = std::isfinite(cfg_.max_half_width)
                        ? static_cast<std::int64_t>(std::floor(cfg_.max_half_width / cfg_.dx))
                        : std::numeric_limits<std::int64_t>::max() / 4;
  std::sort(cfg_.snapshot_times.begin(), cfg_.snapshot_times.end());
}

CauchyState CauchySimulator::initial_state() const {
  const int m = cfg_.model.m();
  const auto [k0, k1] = active_range(-cfg_.h0, cfg_.h0, cfg_.dx);
  const std::int64_t a = std::max(k0 - cfg_.growth_block, -max_nodes_side_);
  const std::int64_t b = std::min(k1 + cfg_.growth_block, max_nodes_side_);
  CauchyState s;
  s.u.dx = cfg_.dx;
  s.u.first_index = a;
  s.u.values.assign(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(b - a + 1), 0.0));
  for (int i = 0; i < m; ++i) {
    const double amp = cfg_.amplitude.empty() ? 0.5 * u_star_[i] : cfg_.amplitude[i];
    for (std::int64_t k = a; k <= b; ++k) {
      const double x = static_cast<double>(k) * cfg_.dx;
      double v = 0.0;
      if (std::abs(x) < cfg_.h0) v = cfg_.initial.empty() ? amp * (1.0 - std::abs(x) / cfg_.h0) : cfg_.initial[i](x);
      if (!(v >= 0.0) || v > cfg_.model.ceiling_or_inf(i))
        throw Error(Errc::InvalidArgument, "initial profile leaves [0, u_ceiling]");
      s.u.values[i][static_cast<size_t>(k - a)] = v;
    }
  }
  return s;
}

void CauchySimulator::grow(CauchyState& s) {
  for (int guard = 0; guard < 1000; ++guard) {
    const auto n = static_cast<std::int64_t>(s.u.size());
    const std::int64_t edge = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(cfg_.edge_fraction * n)));
    double lmax = 0.0, rmax = 0.0;
    for (const auto& v : s.u.values)
      for (std::int64_t p = 0; p < edge; ++p) {
        lmax = std::max(lmax, v[static_cast<size_t>(p)]);
        rmax = std::max(rmax, v[static_cast<size_t>(n - 1 - p)]);
      }
    const std::int64_t first = s.u.first_index, last = s.u.last_index();
    const std::int64_t add_l =
        lmax >= eps_edge_ ? std::min<std::int64_t>(cfg_.growth_block, first + max_nodes_side_) : 0;
    const std::int64_t add_r =
        rmax >= eps_edge_ ? std::min<std::int64_t>(cfg_.growth_block, max_nodes_side_ - last) : 0;
    if ((lmax >= eps_edge_ && add_l == 0) || (rmax >= eps_edge_ && add_r == 0)) capped_ = true;
    if (add_l <= 0 && add_r <= 0) return;
    for (auto& v : s.u.values) {
      v.insert(v.begin(), static_cast<size_t>(std::max<std::int64_t>(add_l, 0)), 0.0);
      v.insert(v.end(), static_cast<size_t>(std::max<std::int64_t>(add_r, 0)), 0.0);
    }
    s.u.first_index -= std::max<std::int64_t>(add_l, 0);
  }
}

void CauchySimulator::step(CauchyState& s, double dt) {
  const ReactionModel& model = cfg_.model;
  const int m = model.m();
  const size_t n = s.u.size();
  const std::int64_t t0 = s.u.first_index, t1 = s.u.last_index();
  std::vector<std::vector<double>> next(static_cast<size_t>(m), std::vector<double>(n, 0.0));
  for (int i = 0; i < model.m0(); ++i)
    ops_[i].convolve(s.u.values[i], t0, std::nullopt, t0, t1, next[i], cfg_.conv_path);
  State u(static_cast<size_t>(m)), f(static_cast<size_t>(m));
  for (size_t p = 0; p < n; ++p) {
    for (int i = 0; i < m; ++i) u[i] = s.u.values[i][p];
    model.rates(u, f);
    for (int i = 0; i < m; ++i) {
      const double d = model.diffusion()[i];
      const double du = (i < model.m0() ? d * (next[i][p] - u[i]) : 0.0) + f[i];
      double v = u[i] + dt * du;
      if (!std::isfinite(v) || v < -1e-12 || v > model.ceiling_or_inf(i) + 1e-9) {
        std::ostringstream msg;
        msg << "component " << i + 1 << " at x=" << s.u.x(p) << " has value " << v << " at t=" << s.t
            << " (dt may exceed the stability bound " << stability_bound_ << ")";
        throw InstabilityError(s.t, msg.str());
      }
      next[i][p] = std::max(v, 0.0);
    }
  }
  s.u.values = std::move(next);
  s.t += dt;
  grow(s);
}

double CauchySimulator::leak_bound(const CauchyState& s) const {
  const double half = 0.5 * std::min(-s.left(), s.right());
  double umax = 0.0, tail = 0.0;
  for (const auto& v : s.u.values)
    for (double x : v) umax = std::max(umax, x);
  for (const Kernel& k : cfg_.kernels) tail = std::max(tail, k.tail_mass(std::max(half, 0.0)));
  return tail * umax;
}

CauchySeries CauchySimulator::run() {
  CauchySeries series;
  series.stability_bound = stability_bound_;
  CauchyState s = initial_state();
  auto record = [&]() {
    for (const auto& lv : cfg_.levels) {
      LevelSample ls{s.t, lv.component, lv.lambda, std::nullopt, std::nullopt};
      if (auto xs = level_set(s.u, lv.component, lv.lambda, u_star_[lv.component])) {
        ls.x_minus = xs->first;
        ls.x_plus = xs->second;
      }
      series.levels.push_back(ls);
    }
    series.windows.push_back({s.t, s.left(), s.right()});
    series.max_leak = std::max(series.max_leak, leak_bound(s));
  };
  size_t next_snap = 0;
  auto take_snapshots = [&]() {
    while (next_snap < cfg_.snapshot_times.size() && cfg_.snapshot_times[next_snap] <= s.t + 1e-12) {
      if (cfg_.snapshot_times[next_snap] >= s.t - 1e-12) series.snapshots.push_back({s.t, s.u});
      ++next_snap;
    }
  };
  record();
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
    if (steps % cfg_.sample_stride == 0 || s.t >= cfg_.t_end) record();
    take_snapshots();
  }
  series.capped = capped_;
  return series;
}

CauchySeries run(const CauchyConfig& cfg) {
  CauchySimulator sim(cfg);
  return sim.run();
}

std::optional<std::pair<double, double>> level_set(const GridFunction& u, int i, double lambda, double u_star_i) {
  if (!(lambda > 0.0 && lambda < u_star_i)) throw Error(Errc::InvalidLevel, "level must lie in (0, u*_i)");
  if (i < 0 || i >= static_cast<int>(u.values.size())) throw Error(Errc::InvalidArgument, "component out of range");
  const auto& v = u.values[static_cast<size_t>(i)];
  const auto n = static_cast<std::int64_t>(v.size());
  std::int64_t r = n - 1;
  while (r >= 0 && v[static_cast<size_t>(r)] < lambda) --r;
  if (r < 0) return std::nullopt;
  std::int64_t l = 0;
  while (v[static_cast<size_t>(l)] < lambda) ++l;
  auto cross = [&](std::int64_t inner, std::int64_t outer) {
    const double a = v[static_cast<size_t>(inner)], b = v[static_cast<size_t>(outer)];
    const double frac = (a - lambda) / (a - b);
    return u.x(static_cast<size_t>(inner)) + frac * (u.x(static_cast<size_t>(outer)) - u.x(static_cast<size_t>(inner)));
  };
  const double xp = r + 1 < n ? cross(r, r + 1) : u.x(static_cast<size_t>(r));
  const double xm = l > 0 ? cross(l, l - 1) : u.x(static_cast<size_t>(l));
  return std::make_pair(xm, xp);
}

}  // namespace nlfb
