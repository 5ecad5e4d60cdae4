#include "nlfb/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "nlfb/errors.hpp"
#include "nlfb/expr.hpp"

namespace nlfb {

namespace {

std::string join(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string join(const std::string& ptr, size_t index) { return ptr + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ConfigError(ptr.empty() ? "/" : ptr, "expected an object");
}

void check_keys(const json& j, const std::string& ptr, const std::set<std::string>& allowed) {
  require_object(j, ptr);
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(join(ptr, key), "unknown field");
}

enum class Range { Any, Positive, NonNegative, Fraction };

double check_number(const json& v, const std::string& ptr, Range range) {
  if (!v.is_number()) throw ConfigError(ptr, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(ptr, "must be finite");
  switch (range) {
    case Range::Any: break;
    case Range::Positive:
      if (!(x > 0.0)) throw ConfigError(ptr, "must be > 0");
      break;
    case Range::NonNegative:
      if (!(x >= 0.0)) throw ConfigError(ptr, "must be >= 0");
      break;
    case Range::Fraction:
      if (!(x > 0.0 && x < 1.0)) throw ConfigError(ptr, "must lie in (0, 1)");
      break;
  }
  return x;
}

// Reads obj[key] (or the default) and writes the value used back into `out`
// so the resolved document records every setting.
double number(const json& obj, json& out, const std::string& ptr, const std::string& key, double def,
              Range range = Range::Any) {
  double x = def;
  if (obj.contains(key)) x = check_number(obj.at(key), join(ptr, key), range);
  out[key] = x;
  return x;
}

double required_number(const json& obj, const std::string& ptr, const std::string& key, Range range) {
  if (!obj.contains(key)) throw ConfigError(join(ptr, key), "required field missing");
  return check_number(obj.at(key), join(ptr, key), range);
}

std::vector<double> number_list(const json& v, const std::string& ptr, Range range) {
  if (!v.is_array()) throw ConfigError(ptr, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i) out.push_back(check_number(v[i], join(ptr, i), range));
  return out;
}

int integer(const json& obj, json& out, const std::string& ptr, const std::string& key, int def, int lo) {
  int x = def;
  if (obj.contains(key)) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(ptr, key), "expected an integer");
    x = v.get<int>();
    if (x < lo) throw ConfigError(join(ptr, key), "must be >= " + std::to_string(lo));
  }
  out[key] = x;
  return x;
}

bool boolean(const json& obj, json& out, const std::string& ptr, const std::string& key, bool def) {
  bool x = def;
  if (obj.contains(key)) {
    if (!obj.at(key).is_boolean()) throw ConfigError(join(ptr, key), "expected true or false");
    x = obj.at(key).get<bool>();
  }
  out[key] = x;
  return x;
}

std::map<std::string, double> read_params(const json& doc, const std::set<std::string>* allowed) {
  std::map<std::string, double> params;
  if (!doc.contains("params")) return params;
  const json& p = doc.at("params");
  require_object(p, "/params");
  for (const auto& [key, value] : p.items()) {
    if (allowed && !allowed->count(key)) throw ConfigError("/params/" + key, "unknown parameter for this model");
    params[key] = check_number(value, "/params/" + key, allowed ? Range::Positive : Range::Any);
  }
  return params;
}

double param_or(const std::map<std::string, double>& p, const std::string& key, double def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

ConvPath parse_conv_path(const json& obj, json& out, const std::string& ptr) {
  std::string name = "auto";
  if (obj.contains("conv_path")) {
    if (!obj.at("conv_path").is_string()) throw ConfigError(join(ptr, "conv_path"), "expected a string");
    name = obj.at("conv_path").get<std::string>();
  }
  out["conv_path"] = name;
  if (name == "auto") return ConvPath::Auto;
  if (name == "direct") return ConvPath::Direct;
  if (name == "serial") return ConvPath::Serial;
  if (name == "fft") return ConvPath::Fft;
  throw ConfigError(join(ptr, "conv_path"), "expected one of auto, direct, serial, fft");
}

const std::set<std::string> kTopLevel{"name", "description", "model", "params", "m",      "m0",
                                      "f",    "diffusion",   "ceiling", "kernels", "mu",    "h0",
                                      "initial", "numerics", "thresholds", "levels", "speeds", "fit"};

const std::set<std::string> kNumerics{"dx",          "dt",          "t_end",          "snapshot_times",
                                      "sample_stride", "heun",      "conv_path",      "eps_tail",
                                      "eps_edge_factor", "edge_fraction", "growth_block", "max_half_width",
                                      "semiwave_dx", "L",           "tol_c",          "L_schedule",
                                      "c_grid",      "max_iter",    "cstar_rel_tol",  "max_doublings"};

const std::set<std::string> kThresholds{"growth_factor", "spread_fraction", "vanish_fraction",
                                        "vanish_increment", "final_window",  "proxy_fraction"};

std::vector<Kernel> parse_kernels(const json& doc, int m0, double eps_tail) {
  if (!doc.contains("kernels")) throw ConfigError("/kernels", "required field missing");
  const json& k = doc.at("kernels");
  std::vector<Kernel> out;
  if (k.is_object()) {
    const Kernel kernel = parse_kernel(k, "/kernels", eps_tail);
    out.assign(static_cast<size_t>(m0), kernel);
    return out;
  }
  if (!k.is_array()) throw ConfigError("/kernels", "expected a kernel object or an array of m0 kernels");
  if (static_cast<int>(k.size()) != m0)
    throw ConfigError("/kernels", "expected " + std::to_string(m0) + " kernels (one per diffusing component)");
  for (size_t i = 0; i < k.size(); ++i) out.push_back(parse_kernel(k[i], join("/kernels", i), eps_tail));
  return out;
}

std::vector<double> parse_mu(const json& doc, int m0) {
  if (!doc.contains("mu")) throw ConfigError("/mu", "required field missing");
  std::vector<double> mu = number_list(doc.at("mu"), "/mu", Range::NonNegative);
  if (static_cast<int>(mu.size()) != m0) throw ConfigError("/mu", "expected " + std::to_string(m0) + " entries");
  double sum = 0.0;
  for (double v : mu) sum += v;
  if (!(sum > 0.0)) throw ConfigError("/mu", "sum of mu must be > 0");
  return mu;
}

void check_mesh(const std::vector<Kernel>& kernels, double dx, const std::string& ptr) {
  for (size_t i = 0; i < kernels.size(); ++i)
    if (dx > kernels[i].core_scale() / 4.0)
      throw ConfigError(ptr, "dx exceeds a quarter of the core scale of kernel " + std::to_string(i + 1));
}

std::vector<double> parse_amplitude(const json& doc, const ReactionModel& model, json& resolved) {
  std::vector<double> amp;
  if (!doc.contains("initial")) return amp;
  const json& init = doc.at("initial");
  check_keys(init, "/initial", {"shape", "amplitude"});
  if (init.contains("shape") && init.at("shape") != "tent")
    throw ConfigError("/initial/shape", "only the tent profile is supported");
  if (!init.contains("amplitude")) return amp;
  amp = number_list(init.at("amplitude"), "/initial/amplitude", Range::Positive);
  if (static_cast<int>(amp.size()) != model.m())
    throw ConfigError("/initial/amplitude", "expected " + std::to_string(model.m()) + " entries");
  for (int i = 0; i < model.m(); ++i)
    if (amp[i] > model.ceiling_or_inf(i))
      throw ConfigError(join("/initial/amplitude", static_cast<size_t>(i)), "exceeds the ceiling");
  resolved["initial"]["amplitude"] = amp;
  return amp;
}

OutcomeThresholds parse_thresholds(const json& doc, json& out, SemiWaveOptions* sw) {
  OutcomeThresholds th;
  const json empty = json::object();
  const json& t = doc.contains("thresholds") ? doc.at("thresholds") : empty;
  check_keys(t, "/thresholds", kThresholds);
  json& o = out["thresholds"];
  o = json::object();
  th.growth_factor = number(t, o, "/thresholds", "growth_factor", th.growth_factor, Range::Positive);
  th.spread_fraction = number(t, o, "/thresholds", "spread_fraction", th.spread_fraction, Range::Fraction);
  th.vanish_fraction = number(t, o, "/thresholds", "vanish_fraction", th.vanish_fraction, Range::Fraction);
  th.vanish_increment = number(t, o, "/thresholds", "vanish_increment", th.vanish_increment, Range::Positive);
  th.final_window = number(t, o, "/thresholds", "final_window", th.final_window, Range::Fraction);
  if (sw) sw->proxy_fraction = number(t, o, "/thresholds", "proxy_fraction", sw->proxy_fraction, Range::Fraction);
  return th;
}

struct TimeGrid {
  double dx = 0.1, dt = 0.05, t_end = 10.0;
  std::vector<double> snapshots;
  int stride = 1;
  bool heun = false;
  ConvPath path = ConvPath::Auto;
};

TimeGrid parse_time_grid(const json& num, json& o, const ReactionModel& model, const std::vector<Kernel>& kernels) {
  TimeGrid g;
  g.dx = number(num, o, "/numerics", "dx", g.dx, Range::Positive);
  check_mesh(kernels, g.dx, "/numerics/dx");
  const double bound = stability_bound(model);
  g.dt = number(num, o, "/numerics", "dt", std::min(g.dt, bound), Range::Positive);
  if (g.dt > bound)
    throw ConfigError("/numerics/dt", "dt = " + std::to_string(g.dt) + " exceeds the stability bound " +
                                          std::to_string(bound));
  g.t_end = number(num, o, "/numerics", "t_end", g.t_end, Range::NonNegative);
  if (num.contains("snapshot_times")) {
    g.snapshots = number_list(num.at("snapshot_times"), "/numerics/snapshot_times", Range::NonNegative);
    for (size_t i = 0; i < g.snapshots.size(); ++i)
      if (g.snapshots[i] > g.t_end) throw ConfigError(join("/numerics/snapshot_times", i), "beyond t_end");
    std::sort(g.snapshots.begin(), g.snapshots.end());
  } else {
    g.snapshots = {g.t_end};
  }
  o["snapshot_times"] = g.snapshots;
  g.stride = integer(num, o, "/numerics", "sample_stride", 1, 1);
  g.heun = boolean(num, o, "/numerics", "heun", false);
  g.path = parse_conv_path(num, o, "/numerics");
  return g;
}

double parse_h0(const json& doc, json& resolved) {
  if (!doc.contains("h0")) throw ConfigError("/h0", "required field missing");
  const double h0 = check_number(doc.at("h0"), "/h0", Range::Positive);
  resolved["h0"] = h0;
  return h0;
}

std::vector<LevelSpec> parse_levels(const json& doc, const ReactionModel& model) {
  std::vector<LevelSpec> out;
  if (!doc.contains("levels")) return out;
  const json& lv = doc.at("levels");
  if (!lv.is_array()) throw ConfigError("/levels", "expected an array");
  const State& us = *model.u_star();
  for (size_t n = 0; n < lv.size(); ++n) {
    const std::string ptr = join("/levels", n);
    check_keys(lv[n], ptr, {"component", "lambda", "fraction"});
    if (!lv[n].contains("component") || !lv[n].at("component").is_number_integer())
      throw ConfigError(join(ptr, "component"), "expected a 1-based component index");
    const int comp = lv[n].at("component").get<int>();
    if (comp < 1 || comp > model.m()) throw ConfigError(join(ptr, "component"), "out of range");
    LevelSpec spec{comp - 1, 0.0};
    if (lv[n].contains("lambda") == lv[n].contains("fraction"))
      throw ConfigError(ptr, "give exactly one of lambda or fraction");
    if (lv[n].contains("lambda")) {
      spec.lambda = check_number(lv[n].at("lambda"), join(ptr, "lambda"), Range::Positive);
      if (!(spec.lambda < us[spec.component])) throw ConfigError(join(ptr, "lambda"), "must lie below u*");
    } else {
      spec.lambda = check_number(lv[n].at("fraction"), join(ptr, "fraction"), Range::Fraction) * us[spec.component];
    }
    out.push_back(spec);
  }
  return out;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + " is not valid JSON: " + e.what());
  }
}

Kernel parse_kernel(const json& j, const std::string& ptr, double eps_tail) {
  require_object(j, ptr);
  if (!j.contains("family") || !j.at("family").is_string())
    throw ConfigError(join(ptr, "family"), "expected one of uniform, laplace, gaussian, powerlaw, table");
  const std::string family = j.at("family").get<std::string>();
  KernelSpec spec;
  if (family == "uniform") {
    check_keys(j, ptr, {"family", "radius"});
    spec = UniformSpec{required_number(j, ptr, "radius", Range::Positive)};
  } else if (family == "laplace") {
    check_keys(j, ptr, {"family", "scale"});
    spec = LaplaceSpec{required_number(j, ptr, "scale", Range::Positive)};
  } else if (family == "gaussian") {
    check_keys(j, ptr, {"family", "sigma"});
    spec = GaussianSpec{required_number(j, ptr, "sigma", Range::Positive)};
  } else if (family == "powerlaw") {
    check_keys(j, ptr, {"family", "gamma", "core_width"});
    const double gamma = required_number(j, ptr, "gamma", Range::Positive);
    if (!(gamma > 1.0)) throw ConfigError(join(ptr, "gamma"), "powerlaw kernels need gamma > 1 to be normalizable");
    double w = 1.0;
    if (j.contains("core_width")) w = check_number(j.at("core_width"), join(ptr, "core_width"), Range::Positive);
    spec = PowerLawSpec{gamma, w};
  } else if (family == "table") {
    check_keys(j, ptr, {"family", "x", "values"});
    if (!j.contains("x")) throw ConfigError(join(ptr, "x"), "required field missing");
    if (!j.contains("values")) throw ConfigError(join(ptr, "values"), "required field missing");
    TableSpec t{number_list(j.at("x"), join(ptr, "x"), Range::Any),
                number_list(j.at("values"), join(ptr, "values"), Range::Any)};
    for (size_t i = 0; i < t.values.size(); ++i)
      if (t.values[i] < 0.0) throw ConfigError(join(join(ptr, "values"), i), "table values must be >= 0");
    spec = std::move(t);
  } else {
    throw ConfigError(join(ptr, "family"), "unknown kernel family '" + family + "'");
  }
  try {
    return make_kernel(spec, eps_tail);
  } catch (const Error& e) {
    throw ConfigError(ptr, e.what());
  }
}

ReactionModel parse_model(const json& doc) {
  require_object(doc, "");
  if (!doc.contains("model") || !doc.at("model").is_string())
    throw ConfigError("/model", "expected one of wnv, cholera, concave, custom");
  const std::string name = doc.at("model").get<std::string>();

  int m = 2;
  if (name == "custom") {
    if (!doc.contains("m") || !doc.at("m").is_number_integer()) throw ConfigError("/m", "expected an integer");
    m = doc.at("m").get<int>();
    if (m < 1) throw ConfigError("/m", "must be >= 1");
  } else if (doc.contains("m") || doc.contains("f")) {
    throw ConfigError(doc.contains("m") ? "/m" : "/f", "only custom models take m and f");
  }
  int m0 = m;
  if (doc.contains("m0")) {
    if (!doc.at("m0").is_number_integer()) throw ConfigError("/m0", "expected an integer");
    m0 = doc.at("m0").get<int>();
    if (m0 < 1 || m0 > m) throw ConfigError("/m0", "m0 must satisfy 1 <= m0 <= m = " + std::to_string(m));
  }
  if (name != "custom" && m0 != 2) throw ConfigError("/m0", "preset models have m0 = 2");

  std::vector<double> diffusion(static_cast<size_t>(m), 0.0);
  std::fill(diffusion.begin(), diffusion.begin() + m0, 1.0);
  if (doc.contains("diffusion")) {
    diffusion = number_list(doc.at("diffusion"), "/diffusion", Range::NonNegative);
    if (static_cast<int>(diffusion.size()) != m) throw ConfigError("/diffusion", "expected m entries");
    for (int i = 0; i < m; ++i) {
      if (i < m0 && !(diffusion[i] > 0.0))
        throw ConfigError(join("/diffusion", static_cast<size_t>(i)), "diffusing components need d > 0");
      if (i >= m0 && diffusion[i] != 0.0)
        throw ConfigError(join("/diffusion", static_cast<size_t>(i)), "non-diffusing components need d = 0");
    }
  }

  std::optional<ReactionModel> model;
  if (name == "wnv") {
    const std::set<std::string> keys{"a1", "a2", "b1", "b2", "e1", "e2"};
    const auto p = read_params(doc, &keys);
    WnvParams w;
    w = {param_or(p, "a1", w.a1), param_or(p, "a2", w.a2), param_or(p, "b1", w.b1),
         param_or(p, "b2", w.b2), param_or(p, "e1", w.e1), param_or(p, "e2", w.e2)};
    model.emplace(make_wnv(w, diffusion));
  } else if (name == "cholera") {
    const std::set<std::string> keys{"a", "b", "c", "alpha", "beta"};
    const auto p = read_params(doc, &keys);
    CholeraParams c;
    c = {param_or(p, "a", c.a), param_or(p, "b", c.b), param_or(p, "c", c.c), param_or(p, "alpha", c.alpha),
         param_or(p, "beta", c.beta)};
    model.emplace(make_cholera(c, diffusion));
  } else if (name == "concave") {
    const std::set<std::string> keys{"a", "b", "alpha", "beta"};
    const auto p = read_params(doc, &keys);
    ConcaveParams c;
    c = {param_or(p, "a", c.a), param_or(p, "b", c.b), param_or(p, "alpha", c.alpha), param_or(p, "beta", c.beta)};
    model.emplace(make_concave(c, diffusion));
  } else if (name == "custom") {
    if (!doc.contains("f") || !doc.at("f").is_array()) throw ConfigError("/f", "expected an array of m expressions");
    const json& f = doc.at("f");
    if (static_cast<int>(f.size()) != m) throw ConfigError("/f", "expected " + std::to_string(m) + " expressions");
    std::vector<std::string> exprs;
    for (size_t i = 0; i < f.size(); ++i) {
      if (!f[i].is_string()) throw ConfigError(join("/f", i), "expected a string");
      exprs.push_back(f[i].get<std::string>());
    }
    const auto params = read_params(doc, nullptr);
    for (size_t i = 0; i < exprs.size(); ++i) {
      try {
        Expr::compile(exprs[i], m, params);
      } catch (const Error& e) {
        throw ConfigError(join("/f", i), e.what());
      }
    }
    std::optional<State> ceiling;
    if (doc.contains("ceiling")) {
      ceiling = number_list(doc.at("ceiling"), "/ceiling", Range::Positive);
      if (static_cast<int>(ceiling->size()) != m) throw ConfigError("/ceiling", "expected m entries");
    }
    model.emplace(make_custom(m, m0, exprs, params, diffusion, ceiling));
  } else {
    throw ConfigError("/model", "unknown model '" + name + "'");
  }
  if (name != "custom" && doc.contains("ceiling")) throw ConfigError("/ceiling", "presets fix their own ceiling");
  if (!model->u_star()) throw ConfigError("/params", "model has no positive equilibrium: " + model->equilibrium_failure());
  return std::move(*model);
}

Scenario parse_scenario(const json& doc, Driver driver) {
  check_keys(doc, "", kTopLevel);
  Scenario sc;
  sc.resolved = doc;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw ConfigError("/name", "expected a string");
    sc.name = doc.at("name").get<std::string>();
  }

  ReactionModel model = parse_model(doc);
  const json empty = json::object();
  const json& num = doc.contains("numerics") ? doc.at("numerics") : empty;
  check_keys(num, "/numerics", kNumerics);
  json& o = sc.resolved["numerics"];
  o = json::object();
  const double eps_tail = number(num, o, "/numerics", "eps_tail", Kernel::kDefaultEpsTail, Range::Positive);
  if (eps_tail > 1e-4) throw ConfigError("/numerics/eps_tail", "must be <= 1e-4");
  std::vector<Kernel> kernels = parse_kernels(doc, model.m0(), eps_tail);

  if (doc.contains("fit")) {
    const json& f = doc.at("fit");
    check_keys(f, "/fit", {"law", "window"});
    if (f.contains("law")) {
      if (!f.at("law").is_string()) throw ConfigError("/fit/law", "expected a string");
      sc.fit.law = f.at("law").get<std::string>();
      if (sc.fit.law != "auto" && sc.fit.law != "linear" && sc.fit.law != "tlogt" && sc.fit.law != "power")
        throw ConfigError("/fit/law", "expected auto, linear, tlogt or power");
    }
    if (f.contains("window")) {
      const auto w = number_list(f.at("window"), "/fit/window", Range::NonNegative);
      if (w.size() != 2 || !(w[0] < w[1])) throw ConfigError("/fit/window", "expected [t_start, t_end] with t_start < t_end");
      sc.fit.window = Window{w[0], w[1]};
    }
  }

  switch (driver) {
    case Driver::FreeBoundary: {
      const std::vector<double> mu = parse_mu(doc, model.m0());
      const double h0 = parse_h0(doc, sc.resolved);
      const TimeGrid g = parse_time_grid(num, o, model, kernels);
      const std::vector<double> amp = parse_amplitude(doc, model, sc.resolved);
      const OutcomeThresholds th = parse_thresholds(doc, sc.resolved, nullptr);
      FBConfig cfg{std::move(model), std::move(kernels), mu, h0, {}, amp, g.dx, g.dt, g.t_end,
                   g.snapshots, g.stride, g.heun, th, g.path};
      sc.fb.emplace(std::move(cfg));
      break;
    }
    case Driver::Cauchy: {
      const double h0 = parse_h0(doc, sc.resolved);
      const TimeGrid g = parse_time_grid(num, o, model, kernels);
      const std::vector<double> amp = parse_amplitude(doc, model, sc.resolved);
      std::vector<LevelSpec> levels = parse_levels(doc, model);
      CauchyConfig cfg{std::move(model), std::move(kernels), h0, {}, amp, g.dx, g.dt, g.t_end, g.snapshots,
                       std::move(levels), g.stride};
      cfg.conv_path = g.path;
      cfg.eps_edge_factor = number(num, o, "/numerics", "eps_edge_factor", cfg.eps_edge_factor, Range::Positive);
      cfg.edge_fraction = number(num, o, "/numerics", "edge_fraction", cfg.edge_fraction, Range::Fraction);
      cfg.growth_block = integer(num, o, "/numerics", "growth_block", cfg.growth_block, 1);
      if (num.contains("max_half_width"))
        cfg.max_half_width = check_number(num.at("max_half_width"), "/numerics/max_half_width", Range::Positive);
      o["max_half_width"] = std::isfinite(cfg.max_half_width) ? json(cfg.max_half_width) : json("infinite");
      sc.resolved.erase("thresholds");
      sc.cauchy.emplace(std::move(cfg));
      break;
    }
    case Driver::Speeds: {
      const std::vector<double> mu = parse_mu(doc, model.m0());
      SemiWaveOptions opts;
      double scale = 0.0;
      for (const Kernel& k : kernels) scale = std::max(scale, k.core_scale());
      opts.dx = number(num, o, "/numerics", "semiwave_dx", opts.dx, Range::Positive);
      check_mesh(kernels, opts.dx, "/numerics/semiwave_dx");
      opts.max_iter = integer(num, o, "/numerics", "max_iter", static_cast<int>(opts.max_iter), 1);
      opts.cstar_rel_tol = number(num, o, "/numerics", "cstar_rel_tol", opts.cstar_rel_tol, Range::Fraction);
      opts.max_doublings = integer(num, o, "/numerics", "max_doublings", opts.max_doublings, 1);
      parse_thresholds(doc, sc.resolved, &opts);
      sc.resolved["thresholds"] = json{{"proxy_fraction", opts.proxy_fraction}};
      const double L = number(num, o, "/numerics", "L", 50.0 * scale, Range::Positive);
      if (L < 20.0 * scale) throw ConfigError("/numerics/L", "must be at least 20 kernel scales");
      const double tol_c = number(num, o, "/numerics", "tol_c", 1e-3, Range::Positive);
      std::vector<double> Ls{50.0 * scale};
      if (num.contains("L_schedule")) {
        Ls = number_list(num.at("L_schedule"), "/numerics/L_schedule", Range::Positive);
        if (Ls.empty()) throw ConfigError("/numerics/L_schedule", "must not be empty");
        if (!std::is_sorted(Ls.begin(), Ls.end())) throw ConfigError("/numerics/L_schedule", "must be increasing");
      }
      o["L_schedule"] = Ls;
      std::vector<double> grid;
      if (num.contains("c_grid")) grid = number_list(num.at("c_grid"), "/numerics/c_grid", Range::Positive);
      o["c_grid"] = grid;

      SpeedsConfig cfg{std::move(model), std::move(kernels), mu, {}, L, tol_c, true, Ls, grid, opts};
      if (doc.contains("speeds")) {
        const json& s = doc.at("speeds");
        check_keys(s, "/speeds", {"mu_sweep", "cstar"});
        if (s.contains("mu_sweep")) cfg.mu_sweep = number_list(s.at("mu_sweep"), "/speeds/mu_sweep", Range::Positive);
        json dummy;
        cfg.cstar = boolean(s, dummy, "/speeds", "cstar", true);
      }
      sc.speeds.emplace(std::move(cfg));
      break;
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path, Driver driver) {
  Scenario sc = parse_scenario(load_json(path), driver);
  if (sc.name.empty()) sc.name = path.stem().string();
  return sc;
}

}  // namespace nlfb
