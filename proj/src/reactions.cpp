#include "nlfb/reactions.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "nlfb/errors.hpp"
#include "nlfb/expr.hpp"

namespace nlfb {

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& a) {
  Eigen::MatrixXd e(a.n, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) e(i, j) = a(i, j);
  return e;
}

// Damped Newton from one seed; returns any root inside the cone (and box).
std::optional<State> newton_solve(const ReactionModel& model, State u) {
  const int m = model.m();
  State f(static_cast<size_t>(m)), trial(static_cast<size_t>(m)), ftrial(static_cast<size_t>(m));
  Matrix jac(m);
  auto admissible = [&](const State& v) {
    for (int i = 0; i < m; ++i) {
      if (!(v[i] >= 0.0) || !std::isfinite(v[i])) return false;
      if (v[i] > model.ceiling_or_inf(i)) return false;
    }
    return true;
  };
  model.rates(u, f);
  for (int it = 0; it < 50; ++it) {
    const double fn = inf_norm(f);
    if (fn < 1e-12 * std::max(1.0, inf_norm(u))) return u;
    model.jacobian_unchecked(u, jac);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) rhs(i) = -f[i];
    const Eigen::VectorXd step = to_eigen(jac).fullPivLu().solve(rhs);
    if (!step.allFinite()) return std::nullopt;
    bool accepted = false;
    for (double t = 1.0; t > 1e-10; t *= 0.5) {
      for (int i = 0; i < m; ++i) trial[i] = u[i] + t * step(i);
      if (!admissible(trial)) continue;
      model.rates(trial, ftrial);
      if (inf_norm(ftrial) < (1.0 - 1e-4 * t) * fn || inf_norm(ftrial) == 0.0) {
        accepted = true;
        break;
      }
    }
    if (!accepted) return std::nullopt;
    u = trial;
    f = ftrial;
  }
  if (inf_norm(f) < 1e-12 * std::max(1.0, inf_norm(u))) return u;
  return std::nullopt;
}

bool is_positive(const State& u) {
  const double scale = std::max(1.0, inf_norm(u));
  return std::all_of(u.begin(), u.end(), [&](double v) { return v > 1e-8 * scale; });
}

}  // namespace

ReactionModel::ReactionModel(std::string name, int m, int m0, std::vector<double> diffusion, RateFn rates,
                             JacFn jacobian, std::optional<State> ceiling, std::map<std::string, double> params)
    : name_(std::move(name)),
      m_(m),
      m0_(m0),
      diffusion_(std::move(diffusion)),
      rates_(std::move(rates)),
      jac_(std::move(jacobian)),
      ceiling_(std::move(ceiling)),
      params_(std::move(params)) {
  if (m < 1) throw Error(Errc::InvalidArgument, "model needs m >= 1");
  if (m0 < 1 || m0 > m) throw Error(Errc::InvalidArgument, "model needs 1 <= m0 <= m");
  if (static_cast<int>(diffusion_.size()) != m)
    throw Error(Errc::InvalidArgument, "diffusion vector must have m entries");
  for (int i = 0; i < m; ++i) {
    if (i < m0 && !(diffusion_[i] > 0.0))
      throw Error(Errc::InvalidArgument, "diffusing components need d_i > 0");
    if (i >= m0 && diffusion_[i] != 0.0)
      throw Error(Errc::InvalidArgument, "non-diffusing components need d_i = 0");
  }
  if (ceiling_ && static_cast<int>(ceiling_->size()) != m)
    throw Error(Errc::InvalidArgument, "ceiling must have m entries");
}

double ReactionModel::max_diffusion() const { return *std::max_element(diffusion_.begin(), diffusion_.end()); }

double ReactionModel::ceiling_or_inf(int i) const {
  return ceiling_ ? (*ceiling_)[static_cast<size_t>(i)] : std::numeric_limits<double>::infinity();
}

State ReactionModel::sampling_box() const {
  if (ceiling_) return *ceiling_;
  State box(static_cast<size_t>(m_), 2.0);
  if (u_star_)
    for (int i = 0; i < m_; ++i) box[i] = 2.0 * (*u_star_)[i];
  return box;
}

void ReactionModel::jacobian_unchecked(std::span<const double> u, Matrix& out) const {
  if (out.n != m_) out = Matrix(m_);
  if (jac_) {
    jac_(u, out);
    return;
  }
  State up(u.begin(), u.end()), um(u.begin(), u.end());
  State fp(static_cast<size_t>(m_)), fm(static_cast<size_t>(m_));
  for (int j = 0; j < m_; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
    up[j] = u[j] + h;
    um[j] = u[j] - h;
    rates_(up, fp);
    rates_(um, fm);
    for (int i = 0; i < m_; ++i) out(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    up[j] = um[j] = u[j];
  }
}

ReactionModel finalize(ReactionModel model, std::optional<std::string> threshold_failure) {
  if (threshold_failure) {
    model.equilibrium_failure_ = *threshold_failure;
    return model;
  }
  std::vector<State> seeds;
  if (model.ceiling_) {
    State half = *model.ceiling_;
    for (double& v : half) v *= 0.5;
    seeds.push_back(half);
  }
  for (double s : {0.1, 1.0, 10.0}) seeds.emplace_back(static_cast<size_t>(model.m_), s);
  model.u_star_ = newton_positive_root(model, seeds);
  if (!model.u_star_) model.equilibrium_failure_ = "Newton failed from every multi-start seed";
  return model;
}

std::optional<State> newton_positive_root(const ReactionModel& model, std::span<const State> seeds) {
  for (const State& seed : seeds) {
    State s = seed;
    for (int i = 0; i < model.m(); ++i) s[i] = std::min(s[i], model.ceiling_or_inf(i));
    if (auto root = newton_solve(model, s); root && is_positive(*root)) return root;
  }
  return std::nullopt;
}

ReactionModel make_wnv(const WnvParams& p, std::vector<double> diffusion) {
  auto rates = [p](std::span<const double> u, std::span<double> out) {
    out[0] = p.a1 * (p.e1 - u[0]) * u[1] - p.b1 * u[0];
    out[1] = p.a2 * (p.e2 - u[1]) * u[0] - p.b2 * u[1];
  };
  auto jac = [p](std::span<const double> u, Matrix& j) {
    j(0, 0) = -p.a1 * u[1] - p.b1;
    j(0, 1) = p.a1 * (p.e1 - u[0]);
    j(1, 0) = p.a2 * (p.e2 - u[1]);
    j(1, 1) = -p.a2 * u[0] - p.b2;
  };
  std::map<std::string, double> params{{"a1", p.a1}, {"a2", p.a2}, {"b1", p.b1},
                                       {"b2", p.b2}, {"e1", p.e1}, {"e2", p.e2}};
  ReactionModel model("wnv", 2, 2, std::move(diffusion), rates, jac, State{p.e1, p.e2}, params);
  std::optional<std::string> failure;
  if (p.a1 * p.a2 * p.e1 * p.e2 <= p.b1 * p.b2) failure = "R0 <= 1 (a1 a2 e1 e2 <= b1 b2)";
  return finalize(std::move(model), failure);
}

ReactionModel make_cholera(const CholeraParams& p, std::vector<double> diffusion) {
  auto rates = [p](std::span<const double> u, std::span<double> out) {
    out[0] = -p.a * u[0] + p.c * u[1];
    out[1] = -p.b * u[1] + p.alpha * u[0] / (1.0 + p.beta * u[0]);
  };
  auto jac = [p](std::span<const double> u, Matrix& j) {
    const double q = 1.0 + p.beta * u[0];
    j(0, 0) = -p.a;
    j(0, 1) = p.c;
    j(1, 0) = p.alpha / (q * q);
    j(1, 1) = -p.b;
  };
  std::map<std::string, double> params{
      {"a", p.a}, {"b", p.b}, {"c", p.c}, {"alpha", p.alpha}, {"beta", p.beta}};
  ReactionModel model("cholera", 2, 2, std::move(diffusion), rates, jac, std::nullopt, params);
  std::optional<std::string> failure;
  if (p.alpha * p.c <= p.a * p.b) failure = "R0 = G'(0) c / (a b) <= 1";
  return finalize(std::move(model), failure);
}

ReactionModel make_concave(const ConcaveParams& p, std::vector<double> diffusion) {
  auto rates = [p](std::span<const double> u, std::span<double> out) {
    out[0] = -p.a * u[0] + p.alpha * u[1] / (1.0 + u[1]);
    out[1] = -p.b * u[1] + p.beta * std::log1p(u[0]);
  };
  auto jac = [p](std::span<const double> u, Matrix& j) {
    j(0, 0) = -p.a;
    j(0, 1) = p.alpha / ((1.0 + u[1]) * (1.0 + u[1]));
    j(1, 0) = p.beta / (1.0 + u[0]);
    j(1, 1) = -p.b;
  };
  std::map<std::string, double> params{{"a", p.a}, {"b", p.b}, {"alpha", p.alpha}, {"beta", p.beta}};
  ReactionModel model("concave", 2, 2, std::move(diffusion), rates, jac, std::nullopt, params);
  std::optional<std::string> failure;
  if (p.alpha * p.beta <= p.a * p.b) failure = "H'(0) G'(0) / (a b) <= 1";
  return finalize(std::move(model), failure);
}

ReactionModel make_custom(int m, int m0, const std::vector<std::string>& f, const std::map<std::string, double>& params,
                          std::vector<double> diffusion, std::optional<State> ceiling) {
  if (static_cast<int>(f.size()) != m) throw Error(Errc::InvalidArgument, "custom model needs m rate expressions");
  std::vector<Expr> exprs;
  exprs.reserve(f.size());
  for (const auto& src : f) exprs.push_back(Expr::compile(src, m, params));
  auto rates = [exprs = std::move(exprs)](std::span<const double> u, std::span<double> out) {
    for (size_t i = 0; i < exprs.size(); ++i) out[i] = exprs[i].eval(u);
  };
  ReactionModel model("custom", m, m0, std::move(diffusion), rates, nullptr, std::move(ceiling), params);
  return finalize(std::move(model), std::nullopt);
}

State eval_F(const ReactionModel& model, std::span<const double> u) {
  if (static_cast<int>(u.size()) != model.m()) throw Error(Errc::InvalidArgument, "state has wrong dimension");
  for (int i = 0; i < model.m(); ++i) {
    if (u[i] < 0.0) throw Error(Errc::OutOfCone, "component " + std::to_string(i + 1) + " is negative");
    if (u[i] > model.ceiling_or_inf(i))
      throw Error(Errc::AboveCeiling, "component " + std::to_string(i + 1) + " exceeds the ceiling");
  }
  State out(static_cast<size_t>(model.m()));
  model.rates(u, out);
  return out;
}

Matrix jacobian(const ReactionModel& model, std::span<const double> u) {
  eval_F(model, u);
  Matrix j(model.m());
  model.jacobian_unchecked(u, j);
  return j;
}

Matrix finite_difference_jacobian(const ReactionModel& model, std::span<const double> u) {
  const int m = model.m();
  Matrix out(m);
  State up(u.begin(), u.end()), um(u.begin(), u.end());
  State fp(static_cast<size_t>(m)), fm(static_cast<size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(u[j]));
    up[j] = u[j] + h;
    um[j] = u[j] - h;
    model.rates(up, fp);
    model.rates(um, fm);
    for (int i = 0; i < m; ++i) out(i, j) = (fp[i] - fm[i]) / (2.0 * h);
    up[j] = um[j] = u[j];
  }
  return out;
}

State positive_equilibrium(const ReactionModel& model) {
  if (!model.u_star()) throw Error(Errc::NoPositiveRoot, model.name() + ": " + model.equilibrium_failure());
  return *model.u_star();
}

double principal_eigenvalue(const Matrix& a) {
  const int n = a.n;
  double shift = 1.0;
  for (int i = 0; i < n; ++i) shift = std::max(shift, std::abs(a(i, i)) + 1.0);
  std::vector<double> v(static_cast<size_t>(n), 1.0 / std::sqrt(static_cast<double>(n))), w(v.size());
  double rho = 0.0;
  for (int it = 0; it < 100000; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = shift * v[i];
      for (int j = 0; j < n; ++j) s += a(i, j) * v[j];
      w[i] = s;
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return -shift;
    double change = 0.0;
    for (int i = 0; i < n; ++i) {
      const double nv = w[i] / norm;
      change = std::max(change, std::abs(nv - v[i]));
      v[i] = nv;
    }
    const double prev = rho;
    rho = norm;
    if (it > 10 && change < 1e-15 && std::abs(rho - prev) < 1e-15 * rho) break;
  }
  return rho - shift;
}

bool is_irreducible(const Matrix& a) {
  const int n = a.n;
  if (n == 1) return true;
  auto reach_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        const double e = transpose ? a(j, i) : a(i, j);
        if (j != i && e != 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
  };
  return reach_all(false) && reach_all(true);
}

std::vector<State> stratified_samples(const State& upper, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const size_t m = upper.size();
  std::vector<State> pts(static_cast<size_t>(n), State(m));
  std::vector<int> perm(static_cast<size_t>(n));
  for (size_t d = 0; d < m; ++d) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int k = 0; k < n; ++k) pts[k][d] = upper[d] * (perm[k] + unit(rng)) / n;
  }
  return pts;
}

double lipschitz_bound(const ReactionModel& model, int n_samples, std::uint64_t seed) {
  const State box = model.sampling_box();
  auto pts = stratified_samples(box, n_samples, seed);
  pts.emplace_back(static_cast<size_t>(model.m()), 0.0);
  pts.push_back(box);
  Matrix j(model.m());
  double best = 0.0;
  for (const auto& p : pts) {
    model.jacobian_unchecked(p, j);
    for (int i = 0; i < model.m(); ++i) {
      double row = 0.0;
      for (int c = 0; c < model.m(); ++c) row += std::abs(j(i, c));
      best = std::max(best, row);
    }
  }
  return 1.5 * best;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotChecked: return "not-checked";
  }
  return "?";
}

const AssumptionCheck& AssumptionReport::at(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error(Errc::InvalidArgument, "no assumption check named " + name);
}

std::vector<std::string> AssumptionReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) out.push_back(c.name);
  return out;
}

AssumptionReport verify_assumptions(const ReactionModel& model, int n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw Error(Errc::InvalidArgument, "verify_assumptions needs n_samples >= 100");
  const int m = model.m();
  const State zero(static_cast<size_t>(m), 0.0);
  AssumptionReport report;
  auto add = [&](std::string name, CheckStatus st, std::string detail, std::optional<State> witness = {}) {
    report.checks.push_back({std::move(name), st, std::move(witness), std::move(detail)});
  };

  if (!model.u_star()) {
    add("f1(i)", CheckStatus::Fail, "no positive equilibrium: " + model.equilibrium_failure());
    for (const char* n : {"f1(ii)", "f1(iii)", "f1(iv)", "f2", "f3", "f6"})
      add(n, CheckStatus::NotChecked, "requires u*");
    add("f4", CheckStatus::NotChecked, "dynamical; probed by simulation");
    add("f5", CheckStatus::NotChecked, "dynamical; probed by simulation");
    return report;
  }
  const State& us = *model.u_star();
  const double scale = std::max(1.0, inf_norm(us));
  const double tol = 1e-10 * scale;
  const State box = model.sampling_box();
  const auto samples = stratified_samples(box, n_samples, seed);
  State f(static_cast<size_t>(m)), g(static_cast<size_t>(m));
  Matrix jac(m);

  // (f1)(i): F(0) = 0 and no third root among Newton runs from sampled seeds
  {
    model.rates(zero, f);
    if (inf_norm(f) > 1e-12) {
      add("f1(i)", CheckStatus::Fail, "F(0) != 0", zero);
    } else {
      std::optional<State> extra;
      const int n_seeds = std::min(n_samples, 64);
      for (int k = 0; k < n_seeds && !extra; ++k) {
        auto root = newton_solve(model, samples[static_cast<size_t>(k)]);
        if (!root) continue;
        double dz = inf_norm(*root), du = 0.0;
        for (int i = 0; i < m; ++i) du = std::max(du, std::abs((*root)[i] - us[i]));
        if (dz > 1e-7 * scale && du > 1e-7 * scale) extra = root;
      }
      if (extra) add("f1(i)", CheckStatus::Fail, "found a third equilibrium", extra);
      else add("f1(i)", CheckStatus::Pass, "roots found: 0 and u*");
    }
  }

  // (f1)(ii): cooperativity on the box
  {
    std::optional<State> bad;
    for (const auto& p : samples) {
      model.jacobian_unchecked(p, jac);
      for (int i = 0; i < m && !bad; ++i)
        for (int j = 0; j < m && !bad; ++j)
          if (i != j && jac(i, j) < -1e-12 * scale) bad = p;
      if (bad) break;
    }
    if (bad) add("f1(ii)", CheckStatus::Fail, "negative off-diagonal partial derivative", bad);
    else add("f1(ii)", CheckStatus::Pass, "off-diagonal Jacobian >= 0 at all samples");
  }

  // (f1)(iii)
  Matrix j0(m);
  model.jacobian_unchecked(zero, j0);
  {
    const bool irred = is_irreducible(j0);
    const double lam = principal_eigenvalue(j0);
    const std::string detail = "irreducible=" + std::string(irred ? "true" : "false") +
                               ", principal eigenvalue=" + std::to_string(lam);
    add("f1(iii)", irred && lam > 0.0 ? CheckStatus::Pass : CheckStatus::Fail, detail, zero);
  }

  // (f1)(iv)
  if (model.m0() < m) {
    std::optional<State> bad;
    const auto inner = stratified_samples(us, n_samples, seed + 1);
    for (const auto& p : inner) {
      model.jacobian_unchecked(p, jac);
      for (int i = model.m0(); i < m && !bad; ++i)
        for (int j = 0; j < model.m0() && !bad; ++j)
          if (!(jac(i, j) > 0.0)) bad = p;
      if (bad) break;
    }
    if (bad) add("f1(iv)", CheckStatus::Fail, "coupling from diffusing components is not positive", bad);
    else add("f1(iv)", CheckStatus::Pass, "coupling positive on [0, u*]");
  } else {
    add("f1(iv)", CheckStatus::Pass, "vacuous (m0 = m)");
  }

  // (f2): subhomogeneity
  {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::optional<State> bad;
    State ku(static_cast<size_t>(m));
    for (const auto& p : samples) {
      const double k = unit(rng);
      for (int i = 0; i < m; ++i) ku[i] = k * p[i];
      model.rates(ku, f);
      model.rates(p, g);
      for (int i = 0; i < m; ++i)
        if (f[i] - k * g[i] < -tol * std::max(1.0, std::abs(g[i]))) bad = p;
      if (bad) break;
    }
    if (bad) add("f2", CheckStatus::Fail, "F(ku) < kF(u) at witness", bad);
    else add("f2", CheckStatus::Pass, "F(ku) >= kF(u) at all samples");
  }

  // (f3)
  Matrix js(m);
  model.jacobian_unchecked(us, js);
  std::vector<double> row_sum(static_cast<size_t>(m), 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) row_sum[i] += js(i, j) * us[j];
  {
    const Eigen::MatrixXd e = to_eigen(js);
    const double det = e.determinant();
    const double jn = e.cwiseAbs().rowwise().sum().maxCoeff();
    std::string detail;
    bool ok = std::abs(det) > 1e-12 * std::pow(std::max(jn, 1e-300), m);
    if (!ok) detail = "grad F(u*) is singular";
    const double eps0 = 0.1 * *std::min_element(us.begin(), us.end());
    const auto probe = stratified_samples(State(static_cast<size_t>(m), eps0), 64, seed + 2);
    for (int i = 0; i < m && ok; ++i) {
      if (row_sum[i] < -tol) continue;
      if (row_sum[i] > tol) {
        ok = false;
        detail = "row " + std::to_string(i + 1) + " of grad F(u*) u* is positive";
        break;
      }
      // zero row sum: F_i must be linear on [u* - eps0, u*]
      for (const auto& d : probe) {
        State v = us;
        double lin = 0.0;
        for (int j = 0; j < m; ++j) {
          v[j] = std::max(0.0, us[j] - d[j]);
          lin += js(i, j) * (v[j] - us[j]);
        }
        model.rates(v, f);
        if (std::abs(f[i] - lin) > 1e-9 * scale) {
          ok = false;
          detail = "row " + std::to_string(i + 1) + " has zero sum but f_i is not linear near u*";
          break;
        }
      }
      if (ok) detail += "row " + std::to_string(i + 1) + " uses the linear branch; ";
    }
    if (ok && detail.empty()) detail = "strict inequality in every row";
    add("f3", ok ? CheckStatus::Pass : CheckStatus::Fail, detail, ok ? std::nullopt : std::optional<State>(us));
  }

  add("f4", CheckStatus::NotChecked, "dynamical; probed by simulation");
  add("f5", CheckStatus::NotChecked, "dynamical; probed by simulation");

  // (f6)
  {
    std::string detail;
    std::optional<State> witness;
    for (int i = 0; i < m && detail.empty(); ++i) {
      double s0 = 0.0;
      for (int j = 0; j < m; ++j) s0 += j0(i, j) * us[j];
      if (!(s0 > tol)) {
        detail = "row " + std::to_string(i + 1) + " of grad F(0) u* is not positive";
        witness = zero;
      } else if (!(row_sum[i] < -tol)) {
        detail = "row " + std::to_string(i + 1) + " of grad F(u*) u* is not negative";
        witness = us;
      }
    }
    if (detail.empty()) {
      State v(static_cast<size_t>(m));
      for (int k = 0; k < 200 && detail.empty(); ++k) {
        const double eta = (k + 0.5) / 200.0;
        for (int j = 0; j < m; ++j) v[j] = eta * us[j];
        model.rates(v, f);
        for (int i = 0; i < m; ++i)
          if (!(f[i] > 1e-13 * scale)) {
            detail = "f_" + std::to_string(i + 1) + "(eta u*) <= 0 at eta=" + std::to_string(eta);
            witness = v;
            break;
          }
      }
    }
    if (detail.empty()) add("f6", CheckStatus::Pass, "all three conditions hold");
    else add("f6", CheckStatus::Fail, detail, witness);
  }
  return report;
}

}  // namespace nlfb
