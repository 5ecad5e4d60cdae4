#include "nlfb/semiwave.hpp"

#include <algorithm>
#include <cmath>

#include "nlfb/errors.hpp"
#include "nlfb/fb_sim.hpp"
#include "nlfb/nonlocal_ops.hpp"

namespace nlfb {

namespace {

using Profile2 = std::vector<std::vector<double>>;

/// Pseudo-time relaxation machinery shared by the profile solver and the
/// threshold search. The discrete map is order preserving, so sequences
/// started from a supersolution decrease and from a subsolution increase.
class Relaxer {
 public:
  Relaxer(const ReactionModel& model, const std::vector<Kernel>& kernels, double L, const SemiWaveOptions& opts)
      : model_(model), kernels_(kernels), L_(L) {
    if (static_cast<int>(kernels.size()) != model.m0())
      throw Error(Errc::InvalidArgument, "need one kernel per diffusing component");
    double scale = 0.0;
    for (const Kernel& k : kernels) scale = std::max(scale, k.core_scale());
    if (!(L >= 20.0 * scale)) throw Error(Errc::InvalidArgument, "truncation length must be >= 20 kernel scales");
    if (!(opts.dx > 0.0)) throw Error(Errc::InvalidArgument, "dx must be positive");
    n_ = static_cast<std::int64_t>(std::ceil(L / opts.dx - 1e-9));
    dx_ = L / static_cast<double>(n_);
    u_star_ = positive_equilibrium(model);
    lf_ = lipschitz_bound(model);
    for (const Kernel& k : kernels) ops_.emplace_back(k, dx_);
    // exterior phi = u* at nodes -1, -2, ...: node k sees sum_{o >= k+1} W_o
    ext_.resize(ops_.size());
    for (size_t i = 0; i < ops_.size(); ++i) {
      ext_[i].resize(static_cast<size_t>(n_ + 1));
      for (std::int64_t k = 0; k <= n_; ++k) ext_[i][static_cast<size_t>(k)] = u_star_[i] * ops_[i].weight_tail(k + 1);
    }
    conv_.assign(static_cast<size_t>(model.m()), std::vector<double>(static_cast<size_t>(n_ + 1), 0.0));
  }

  std::int64_t nodes() const { return n_; }
  double dx() const { return dx_; }
  const State& u_star() const { return u_star_; }

  void set_speed(double c) {
    c_ = c;
    dtau_ = 0.5 / (model_.max_diffusion() + lf_ + c / dx_);
  }

  Profile2 upper_start() const {
    Profile2 p(static_cast<size_t>(model_.m()));
    for (int i = 0; i < model_.m(); ++i) {
      p[i].assign(static_cast<size_t>(n_ + 1), u_star_[i]);
      p[i].back() = 0.0;
    }
    return p;
  }

  Profile2 lower_start() const {
    Profile2 p(static_cast<size_t>(model_.m()));
    for (int i = 0; i < model_.m(); ++i) {
      p[i].assign(static_cast<size_t>(n_ + 1), 0.0);
      p[i].front() = u_star_[i];
    }
    return p;
  }

  /// Steady-state residual at every interior node; returns its sup norm and
  /// the largest positive entry (supersolutions have none).
  std::pair<double, double> residual(const Profile2& p, Profile2* out = nullptr) {
    const int m = model_.m();
    for (int i = 0; i < model_.m0(); ++i) {
      ops_[i].convolve(p[i], 0, std::nullopt, 1, n_ - 1, conv_[i]);
      for (std::int64_t k = 1; k < n_; ++k) conv_[i][static_cast<size_t>(k - 1)] += ext_[i][static_cast<size_t>(k)];
    }
    State u(static_cast<size_t>(m)), f(static_cast<size_t>(m));
    double sup = 0.0, pos = 0.0;
    for (std::int64_t k = 1; k < n_; ++k) {
      const auto kk = static_cast<size_t>(k);
      for (int i = 0; i < m; ++i) u[i] = p[i][kk];
      model_.rates(u, f);
      for (int i = 0; i < m; ++i) {
        const double d = model_.diffusion()[i];
        double r = f[i] + c_ * (p[i][kk + 1] - p[i][kk]) / dx_;
        if (i < model_.m0()) r += d * (conv_[i][kk - 1] - p[i][kk]);
        if (out) (*out)[i][kk] = r;
        sup = std::max(sup, std::abs(r));
        pos = std::max(pos, r);
      }
    }
    return {sup, pos};
  }

  /// One pseudo-time step in place; returns the residual sup norm before the step.
  double iterate(Profile2& p) {
    if (scratch_.size() != p.size()) scratch_ = p;
    const double sup = residual(p, &scratch_).first;
    for (int i = 0; i < model_.m(); ++i)
      for (std::int64_t k = 1; k < n_; ++k) {
        const auto kk = static_cast<size_t>(k);
        p[i][kk] = std::clamp(p[i][kk] + dtau_ * scratch_[i][kk], 0.0, u_star_[i]);
      }
    return sup;
  }

  double mid_fraction(const Profile2& p) const {
    const auto mid = static_cast<size_t>(n_ / 2);
    double best = kInfinite;
    for (int i = 0; i < model_.m(); ++i) best = std::min(best, p[i][mid] / u_star_[i]);
    return best;
  }

  SemiWaveSolution package(const Profile2& p, double residual, long iters, bool converged) const {
    SemiWaveSolution s;
    s.c = c_;
    s.L = L_;
    s.dx = dx_;
    s.x.resize(static_cast<size_t>(n_ + 1));
    for (std::int64_t k = 0; k <= n_; ++k) s.x[static_cast<size_t>(k)] = -L_ + static_cast<double>(k) * dx_;
    s.x.back() = 0.0;
    s.phi = p;
    s.residual = residual;
    s.iterations = iters;
    s.converged = converged;
    s.u_star = u_star_;
    s.kernels = kernels_;
    s.monotone = true;
    for (const auto& comp : p)
      for (size_t k = 0; k + 1 < comp.size(); ++k)
        if (comp[k + 1] > comp[k] + 1e-8) s.monotone = false;
    return s;
  }

 private:
  const ReactionModel& model_;
  const std::vector<Kernel>& kernels_;
  double L_;
  std::int64_t n_ = 0;
  double dx_ = 0.0;
  State u_star_;
  double lf_ = 0.0;
  double c_ = 0.0, dtau_ = 0.0;
  std::vector<NonlocalOperator> ops_;
  std::vector<std::vector<double>> ext_;
  Profile2 conv_, scratch_;
};

SemiWaveSolution relax_to_steady(Relaxer& r, double c, double tol, long max_iter, Profile2 p) {
  r.set_speed(c);
  double res = kInfinite;
  long it = 0;
  for (; it < max_iter; ++it) {
    res = r.iterate(p);
    if (res < tol) break;
  }
  if (!(res < tol))
    throw Error(Errc::NoConvergence, "profile relaxation at c=" + std::to_string(c) + " stalled with residual " +
                                         std::to_string(res) + " after " + std::to_string(it) + " iterations");
  return r.package(p, r.residual(p).first, it, true);
}

bool usable_start(Relaxer& r, double c, const SemiWaveSolution* start) {
  if (!start || static_cast<std::int64_t>(start->x.size()) != r.nodes() + 1) return false;
  if (std::abs(start->dx - r.dx()) > 1e-12 * r.dx()) return false;
  r.set_speed(c);
  return r.residual(start->phi).second <= 1e-7;
}

}  // namespace

double SemiWaveSolution::mid_fraction() const {
  const size_t mid = (x.size() - 1) / 2;
  double best = kInfinite;
  for (size_t i = 0; i < phi.size(); ++i) best = std::min(best, phi[i][mid] / u_star[i]);
  return best;
}

double SemiWaveSolution::half_level_position(int i) const {
  const auto& p = phi[static_cast<size_t>(i)];
  const double half = 0.5 * u_star[static_cast<size_t>(i)];
  for (size_t k = 0; k + 1 < p.size(); ++k)
    if (p[k + 1] <= half) {
      const double frac = (p[k] - half) / (p[k] - p[k + 1]);
      return x[k] + frac * (x[k + 1] - x[k]);
    }
  return 0.0;
}

SemiWaveSolution solve_profile(double c, const ReactionModel& model, const std::vector<Kernel>& kernels, double L,
                               double tol, const SemiWaveOptions& opts, const SemiWaveSolution* start) {
  if (!(c >= 0.0)) throw Error(Errc::InvalidArgument, "speed must be nonnegative");
  if (!(tol > 0.0)) throw Error(Errc::InvalidArgument, "tolerance must be positive");
  Relaxer r(model, kernels, L, opts);
  Profile2 p = usable_start(r, c, start) ? start->phi : r.upper_start();
  return relax_to_steady(r, c, tol, opts.max_iter, std::move(p));
}

double flux_functional(const SemiWaveSolution& sol, std::span<const double> mu) {
  double total = 0.0;
  const size_t n = sol.x.size();
  for (size_t i = 0; i < mu.size() && i < sol.kernels.size(); ++i) {
    if (mu[i] == 0.0) continue;
    double s = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const double w = (k == 0 || k + 1 == n) ? 0.5 * sol.dx : sol.dx;
      s += w * sol.phi[i][k] * sol.kernels[i].tail_mass(-sol.x[k]);
    }
    total += mu[i] * s;
  }
  return total;
}

C0Result find_c0(const ReactionModel& model, const std::vector<Kernel>& kernels, std::span<const double> mu, double L,
                 double tol_c, const SemiWaveOptions& opts) {
  if (!(tol_c > 0.0)) throw Error(Errc::InvalidArgument, "tol_c must be positive");
  if (mu.size() != kernels.size()) throw Error(Errc::InvalidArgument, "need one mu per kernel");
  for (size_t i = 0; i < kernels.size(); ++i)
    if (mu[i] > 0.0 && !std::isfinite(first_moment(kernels[i])))
      throw Error(Errc::J1Violated, "kernel " + std::to_string(i + 1) + " (" + kernels[i].family() +
                                        ") has an infinite first moment; no finite spreading speed");
  Relaxer r(model, kernels, L, opts);
  const double tol = 1e-9;
  C0Result out;
  auto evaluate = [&](double c, const SemiWaveSolution* warm) {
    Profile2 p = usable_start(r, c, warm) ? warm->phi : r.upper_start();
    SemiWaveSolution s = relax_to_steady(r, c, tol, opts.max_iter, std::move(p));
    const double g = flux_functional(s, mu) - c;
    out.trace.push_back({c, g});
    return std::make_pair(std::move(s), g);
  };

  double c_lo = 0.0;
  auto [sol_lo, g_lo] = evaluate(0.0, nullptr);
  if (!(g_lo > 0.0)) throw Error(Errc::BracketNotFound, "G(0) is not positive");
  double c_hi = tol_c;
  auto [sol_hi, g_hi] = evaluate(c_hi, &sol_lo);
  int doublings = 0;
  while (g_hi >= 0.0) {
    if (++doublings > opts.max_doublings) throw Error(Errc::BracketNotFound, "doubling budget exhausted");
    c_lo = c_hi;
    sol_lo = std::move(sol_hi);
    g_lo = g_hi;
    c_hi *= 2.0;
    std::tie(sol_hi, g_hi) = evaluate(c_hi, &sol_lo);
  }
  SemiWaveSolution best = std::abs(g_lo) < std::abs(g_hi) ? sol_lo : sol_hi;
  double best_g = std::min(std::abs(g_lo), std::abs(g_hi));
  for (int it = 0; it < 200 && best_g >= tol_c; ++it) {
    const double mid = 0.5 * (c_lo + c_hi);
    auto [s, g] = evaluate(mid, &sol_lo);
    if (std::abs(g) < best_g) {
      best_g = std::abs(g);
      best = s;
    }
    if (g >= 0.0) {
      c_lo = mid;
      sol_lo = std::move(s);
    } else {
      c_hi = mid;
    }
    if (c_hi - c_lo < 1e-14 * c_hi) break;
  }
  out.c0 = best.c;
  out.sol = std::move(best);
  out.sol.residual = std::max(out.sol.residual, 0.0);

  auto sorted = out.trace;
  std::sort(sorted.begin(), sorted.end(), [](const TracePoint& a, const TracePoint& b) { return a.c < b.c; });
  int changes = 0;
  for (size_t k = 0; k + 1 < sorted.size(); ++k)
    if ((sorted[k].G >= 0.0) != (sorted[k + 1].G >= 0.0)) ++changes;
  out.single_sign_change = changes == 1;
  return out;
}

double linearized_speed(const ReactionModel& model, const std::vector<Kernel>& kernels) {
  const int m = model.m();
  const State zero(static_cast<size_t>(m), 0.0);
  Matrix j0(m);
  model.jacobian_unchecked(zero, j0);
  double lam_max = kInfinite, scale = kInfinite;
  for (const Kernel& k : kernels) {
    lam_max = std::min(lam_max, mgf_abscissa(k));
    scale = std::min(scale, k.core_scale());
  }
  if (!(lam_max > 0.0)) return kInfinite;
  const double ub = std::isfinite(lam_max) ? lam_max : 50.0 / scale;
  auto ratio = [&](double lam) {
    Matrix a = j0;
    for (int i = 0; i < model.m0(); ++i)
      a(i, i) += model.diffusion()[i] * (two_sided_mgf(kernels[static_cast<size_t>(i)], lam) - 1.0);
    return principal_eigenvalue(a) / lam;
  };
  const int n = 2000;
  const double lo = 1e-4 * ub, hi = ub * (1.0 - 1e-9);
  double best = kInfinite;
  int best_k = 0;
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) {
    grid[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
    const double v = ratio(grid[k]);
    if (std::isfinite(v) && v < best) {
      best = v;
      best_k = k;
    }
  }
  // golden-section refinement between the grid neighbours
  double a = grid[static_cast<size_t>(std::max(best_k - 1, 0))], b = grid[static_cast<size_t>(std::min(best_k + 1, n - 1))];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = ratio(x1), f2 = ratio(x2);
  for (int it = 0; it < 100; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = ratio(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = ratio(x2);
    }
  }
  return std::min({best, f1, f2});
}

CStarResult estimate_cstar(const ReactionModel& model, const std::vector<Kernel>& kernels,
                           std::span<const double> L_schedule, std::span<const double> c_grid,
                           const SemiWaveOptions& opts) {
  CStarResult out;
  for (size_t i = 0; i < kernels.size(); ++i)
    if (!classify(kernels[i]).satisfies_j2) {
      out.cstar = kInfinite;
      out.reason = "kernel " + std::to_string(i + 1) + " (" + kernels[i].family() + ") violates J2";
      return out;
    }
  if (L_schedule.empty()) throw Error(Errc::InvalidArgument, "L_schedule must not be empty");
  out.linearized = linearized_speed(model, kernels);

  std::vector<double> grid(c_grid.begin(), c_grid.end());
  if (grid.empty())
    for (double f : {0.5, 0.75, 0.9, 1.1, 1.25, 1.5, 2.0}) grid.push_back(f * *out.linearized);
  std::sort(grid.begin(), grid.end());

  std::vector<Relaxer> relaxers;
  std::vector<double> Ls(L_schedule.begin(), L_schedule.end());
  std::sort(Ls.begin(), Ls.end());
  for (double L : Ls) relaxers.emplace_back(model, kernels, L, opts);
  // supersolution warm starts: upper iterates at the largest c known to exist
  std::vector<std::optional<Profile2>> warm(Ls.size());
  std::vector<double> warm_c(Ls.size(), -1.0);

  const double thr = opts.proxy_fraction;
  auto probe = [&](double c) {
    bool exists = false;
    for (size_t li = 0; li < Ls.size(); ++li) {
      Relaxer& r = relaxers[li];
      r.set_speed(c);
      Profile2 up = r.upper_start();
      if (warm[li] && warm_c[li] <= c && r.residual(*warm[li]).second <= 1e-12) up = *warm[li];
      Profile2 low = r.lower_start();
      std::optional<bool> decided;
      double frac = 0.0;
      long it = 0;
      while (!decided && it < opts.max_iter) {
        double res_up = 0.0, res_low = 0.0;
        for (int k = 0; k < 50; ++k, ++it) {
          res_up = r.iterate(up);
          res_low = r.iterate(low);
        }
        const double fu = r.mid_fraction(up), fl = r.mid_fraction(low);
        if (fu < thr) {
          decided = false;
          frac = fu;
        } else if (fl >= thr) {
          decided = true;
          frac = fl;
        } else if (res_up < 1e-9) {
          decided = fu >= thr;
          frac = fu;
        }
        (void)res_low;
      }
      if (!decided) {
        // budget exhausted between the two sequences; the upper one bounds the maximal solution
        decided = r.mid_fraction(up) >= thr;
        frac = r.mid_fraction(up);
      }
      out.probes.push_back({c, Ls[li], frac, *decided});
      exists = *decided;
      if (exists && c >= warm_c[li]) {
        warm[li] = up;
        warm_c[li] = c;
      }
    }
    return exists;
  };

  std::optional<double> c_yes, c_no;
  for (double c : grid) {
    if (probe(c)) {
      c_yes = c;
    } else {
      c_no = c;
      break;
    }
  }
  if (!c_yes || !c_no)
    throw Error(Errc::ThresholdNotBracketed, "existence proxy does not change sign across the speed grid");
  double lo = *c_yes, hi = *c_no;
  while (hi - lo > opts.cstar_rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid)) lo = mid;
    else hi = mid;
  }
  out.bracket = std::make_pair(lo, hi);
  out.cstar = 0.5 * (lo + hi);
  out.reason = "threshold search";
  return out;
}

}  // namespace nlfb
