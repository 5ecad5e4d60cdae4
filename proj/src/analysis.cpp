#include "nlfb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nlfb/errors.hpp"

namespace nlfb {

std::string to_string(GrowthLaw law) {
  switch (law) {
    case GrowthLaw::Linear: return "linear";
    case GrowthLaw::TLogT: return "tlogt";
    case GrowthLaw::Power: return "power";
  }
  return "?";
}

GrowthLaw growth_law_from_string(const std::string& name) {
  if (name == "linear") return GrowthLaw::Linear;
  if (name == "tlogt") return GrowthLaw::TLogT;
  if (name == "power") return GrowthLaw::Power;
  throw Error(Errc::InvalidArgument, "unknown growth law '" + name + "'");
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, slope_se = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::InsufficientData, "degenerate regressor");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (f.slope * x[i] + f.intercept);
    sse += r * r;
  }
  f.slope_se = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return f;
}

}  // namespace

FitReport fit_growth(std::span<const double> t, std::span<const double> y, GrowthLaw law,
                     std::optional<Window> window) {
  if (t.size() != y.size()) throw Error(Errc::InvalidArgument, "t and y differ in length");
  if (t.empty()) throw Error(Errc::InsufficientData, "empty series");
  const Window w = window.value_or(Window{0.5 * t.back(), t.back()});
  std::vector<double> tt, yy;
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] >= w.first && t[i] <= w.second) {
      tt.push_back(t[i]);
      yy.push_back(y[i]);
    }
  if (tt.size() < 20)
    throw Error(Errc::InsufficientData, "need >= 20 samples in the fit window, have " + std::to_string(tt.size()));
  if (law != GrowthLaw::Linear && tt.front() <= 1.0)
    throw Error(Errc::InsufficientData, "tlogt and power fits need t > 1 throughout the window");

  FitReport rep;
  rep.model = law;
  rep.t_start = w.first;
  rep.t_end = w.second;
  rep.n = tt.size();
  std::vector<double> pred(tt.size());
  switch (law) {
    case GrowthLaw::Linear: {
      const LineFit f = least_squares(tt, yy);
      rep.coefficient = f.slope;
      rep.intercept = f.intercept;
      rep.slope_stderr = f.slope_se;
      for (size_t i = 0; i < tt.size(); ++i) pred[i] = f.slope * tt[i] + f.intercept;
      break;
    }
    case GrowthLaw::TLogT: {
      std::vector<double> x(tt.size());
      for (size_t i = 0; i < tt.size(); ++i) x[i] = tt[i] * std::log(tt[i]);
      const LineFit f = least_squares(x, yy);
      rep.coefficient = f.slope;
      rep.intercept = f.intercept;
      rep.slope_stderr = f.slope_se;
      for (size_t i = 0; i < tt.size(); ++i) pred[i] = f.slope * x[i] + f.intercept;
      break;
    }
    case GrowthLaw::Power: {
      std::vector<double> lx(tt.size()), ly(tt.size());
      for (size_t i = 0; i < tt.size(); ++i) {
        if (!(yy[i] > 0.0)) throw Error(Errc::InsufficientData, "power fit needs positive values");
        lx[i] = std::log(tt[i]);
        ly[i] = std::log(yy[i]);
      }
      const LineFit f = least_squares(lx, ly);
      rep.exponent = f.slope;
      rep.coefficient = std::exp(f.intercept);
      rep.intercept = 0.0;
      rep.slope_stderr = f.slope_se;
      for (size_t i = 0; i < tt.size(); ++i) pred[i] = rep.coefficient * std::pow(tt[i], f.slope);
      break;
    }
  }
  double my = 0.0;
  for (double v : yy) my += v;
  my /= static_cast<double>(yy.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < yy.size(); ++i) {
    ss_res += (yy[i] - pred[i]) * (yy[i] - pred[i]);
    ss_tot += (yy[i] - my) * (yy[i] - my);
  }
  rep.r_squared = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : (ss_res == 0.0 ? 1.0 : 0.0);
  rep.rmse = std::sqrt(ss_res / static_cast<double>(yy.size()));
  return rep;
}

namespace {

void front_arrays(const FrontSeries& s, std::vector<double>& t, std::vector<double>& h) {
  t.clear();
  h.clear();
  for (const auto& p : s.samples) {
    t.push_back(p.t);
    h.push_back(p.h);
  }
}

}  // namespace

FitReport fit_front(const FrontSeries& series, GrowthLaw law, std::optional<Window> window) {
  std::vector<double> t, h;
  front_arrays(series, t, h);
  return fit_growth(t, h, law, window);
}

LawSelection best_growth_law(std::span<const double> t, std::span<const double> y, std::optional<Window> window) {
  LawSelection sel;
  for (GrowthLaw law : {GrowthLaw::Linear, GrowthLaw::TLogT, GrowthLaw::Power})
    sel.all.push_back(fit_growth(t, y, law, window));
  size_t best = 0;
  for (size_t i = 1; i < sel.all.size(); ++i)
    if (sel.all[i].r_squared > sel.all[best].r_squared + 1e-4) best = i;
  // a later law only wins by a clear margin; look for near-ties with the winner
  for (size_t i = 0; i < sel.all.size(); ++i)
    if (i != best && std::abs(sel.all[i].r_squared - sel.all[best].r_squared) < 1e-4) sel.ambiguous = true;
  sel.model = sel.all[best].model;
  sel.fit = sel.all[best];
  return sel;
}

LawSelection best_growth_law(const FrontSeries& series, std::optional<Window> window) {
  std::vector<double> t, h;
  front_arrays(series, t, h);
  return best_growth_law(t, h, window);
}

OrderReport compare_orderings(const FrontSeries& a, const FrontSeries& b, double tol) {
  OrderReport rep;
  if (a.samples.size() != b.samples.size()) throw Error(Errc::GridMismatch, "series have different sample counts");
  auto violate = [&](const std::string& msg) {
    if (rep.ordered) rep.first_violation = msg;
    rep.ordered = false;
  };
  for (size_t i = 0; i < a.samples.size(); ++i) {
    const auto& sa = a.samples[i];
    const auto& sb = b.samples[i];
    if (sa.t != sb.t) throw Error(Errc::GridMismatch, "sample times differ");
    ++rep.samples_checked;
    if (sa.h > sb.h) {
      std::ostringstream os;
      os.precision(17);
      os << "h_a > h_b at t=" << sa.t << " (" << sa.h << " > " << sb.h << ")";
      violate(os.str());
    }
    if (sa.g < sb.g) {
      std::ostringstream os;
      os.precision(17);
      os << "g_a < g_b at t=" << sa.t << " (" << sa.g << " < " << sb.g << ")";
      violate(os.str());
    }
  }
  for (const auto& snap_a : a.snapshots) {
    auto it = std::find_if(b.snapshots.begin(), b.snapshots.end(), [&](const Snapshot& s) { return s.t == snap_a.t; });
    if (it == b.snapshots.end()) continue;
    const GridFunction& ua = snap_a.u;
    const GridFunction& ub = it->u;
    if (ua.dx != ub.dx || ua.values.size() != ub.values.size()) throw Error(Errc::GridMismatch, "snapshot grids differ");
    for (size_t c = 0; c < ua.values.size(); ++c)
      for (size_t n = 0; n < ua.size(); ++n) {
        const std::int64_t k = ua.first_index + static_cast<std::int64_t>(n);
        const double vb = (k >= ub.first_index && k <= ub.last_index())
                              ? ub.values[c][static_cast<size_t>(k - ub.first_index)]
                              : 0.0;
        ++rep.nodes_checked;
        if (ua.values[c][n] > vb + tol) {
          std::ostringstream os;
          os.precision(17);
          os << "u_a > u_b for component " << c + 1 << " at x=" << ua.x(n) << ", t=" << snap_a.t;
          violate(os.str());
        }
      }
  }
  return rep;
}

}  // namespace nlfb
