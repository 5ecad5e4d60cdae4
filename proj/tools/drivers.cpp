#include "drivers.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "nlfb/analysis.hpp"
#include "nlfb/errors.hpp"
#include "nlfb/io.hpp"
#include "nlfb/verify.hpp"

namespace nlfb::cli {

namespace {

json c_value(double c) { return json_number(c); }

// Tightest (G > 0, G < 0) pair on a find_c0 trace.
json c0_bracket(const std::vector<TracePoint>& trace) {
  double lo = -kInfinite, hi = kInfinite;
  for (const auto& p : trace) {
    if (p.G > 0.0) lo = std::max(lo, p.c);
    if (p.G < 0.0) hi = std::min(hi, p.c);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return nullptr;
  return json{lo, hi};
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Trajectory {
  std::string label;
  std::vector<double> t, y;
};

std::vector<Trajectory> read_trajectories(const fs::path& input) {
  std::ifstream in(input);
  if (!in) throw Error(Errc::InvalidArgument, "cannot open " + input.string());
  std::string line;
  std::getline(in, line);
  const auto header = split_csv(line);
  std::vector<Trajectory> out;
  if (header == std::vector<std::string>{"t", "g", "h"}) {
    Trajectory h{"h", {}, {}}, g{"-g", {}, {}};
    while (std::getline(in, line)) {
      const auto c = split_csv(line);
      if (c.size() != 3) continue;
      const double t = std::stod(c[0]);
      h.t.push_back(t);
      h.y.push_back(std::stod(c[2]));
      g.t.push_back(t);
      g.y.push_back(-std::stod(c[1]));
    }
    out = {h, g};
  } else if (header == std::vector<std::string>{"t", "i", "lambda", "x_minus", "x_plus"}) {
    std::map<std::pair<int, std::string>, std::pair<Trajectory, Trajectory>> groups;
    while (std::getline(in, line)) {
      const auto c = split_csv(line);
      if (c.size() != 5) continue;
      const auto key = std::make_pair(std::stoi(c[1]), c[2]);
      auto& [plus, minus] = groups[key];
      const double t = std::stod(c[0]);
      if (!c[4].empty()) {
        plus.t.push_back(t);
        plus.y.push_back(std::stod(c[4]));
      }
      if (!c[3].empty()) {
        minus.t.push_back(t);
        minus.y.push_back(-std::stod(c[3]));
      }
    }
    for (auto& [key, pair] : groups) {
      const std::string tag = "i=" + std::to_string(key.first) + ",lambda=" + key.second;
      pair.first.label = "x_plus(" + tag + ")";
      pair.second.label = "-x_minus(" + tag + ")";
      out.push_back(std::move(pair.first));
      out.push_back(std::move(pair.second));
    }
  } else {
    throw Error(Errc::InvalidArgument, input.string() + ": expected a fronts.csv or levels.csv header");
  }
  return out;
}

}  // namespace

int simulate_fb(const Scenario& sc, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  const FBConfig& cfg = *sc.fb;
  json summary{{"name", sc.name}, {"seed", seed}, {"thresholds_used", to_json(cfg.thresholds)},
               {"config", sc.resolved}};
  try {
    FBSimulator sim(cfg);
    summary["stability_bound"] = sim.stability_bound();
    const FrontSeries series = sim.run();
    const Outcome outcome = classify_outcome(series, cfg);
    const FrontSample& last = series.samples.back();
    summary["outcome"] = to_string(outcome);
    summary["final_t"] = last.t;
    summary["final_g"] = last.g;
    summary["final_h"] = last.h;
    write_fronts_csv(out / "fronts.csv", series);
    write_snapshots_csv(out / "snapshots.csv", series.snapshots, cfg.model.m());
    write_json(out / "summary.json", summary);
    log << sc.name << ": " << to_string(outcome) << " at t=" << format_double(last.t) << ", [g, h] = ["
        << format_double(last.g) << ", " << format_double(last.h) << "]\n";
    return Ok;
  } catch (const InstabilityError& e) {
    summary["outcome"] = "Instability";
    summary["failed_at"] = e.time();
    summary["error"] = e.what();
    write_json(out / "summary.json", summary);
    log << sc.name << ": " << e.what() << " (t=" << format_double(e.time()) << ")\n";
    return NumericalFailure;
  }
}

int simulate_cauchy(const Scenario& sc, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  const CauchyConfig& cfg = *sc.cauchy;
  json summary{{"name", sc.name}, {"seed", seed}, {"config", sc.resolved}};
  try {
    CauchySimulator sim(cfg);
    summary["stability_bound"] = sim.stability_bound();
    summary["eps_edge"] = sim.eps_edge();
    const CauchySeries series = sim.run();
    const auto& w = series.windows.back();
    summary["final_t"] = w[0];
    summary["window"] = {w[1], w[2]};
    summary["max_leak"] = series.max_leak;
    summary["capped"] = series.capped;
    write_levels_csv(out / "levels.csv", series.levels);
    write_snapshots_csv(out / "snapshots.csv", series.snapshots, cfg.model.m());
    write_json(out / "summary.json", summary);
    log << sc.name << ": t=" << format_double(w[0]) << ", window [" << format_double(w[1]) << ", "
        << format_double(w[2]) << "], leak bound " << format_double(series.max_leak)
        << (series.capped ? " (window capped)" : "") << "\n";
    return Ok;
  } catch (const InstabilityError& e) {
    summary["outcome"] = "Instability";
    summary["failed_at"] = e.time();
    summary["error"] = e.what();
    write_json(out / "summary.json", summary);
    log << sc.name << ": " << e.what() << "\n";
    return NumericalFailure;
  }
}

int speeds(const Scenario& sc, const fs::path& out, std::ostream& log) {
  const SpeedsConfig& cfg = *sc.speeds;
  json doc{{"name", sc.name}, {"config", sc.resolved}};
  json brackets = json::object();
  int status = Ok;

  auto scaled = [&](double s) {
    std::vector<double> mu = cfg.mu;
    for (double& v : mu) v *= s;
    return mu;
  };
  std::vector<double> scales = cfg.mu_sweep;
  if (std::find(scales.begin(), scales.end(), 1.0) == scales.end()) scales.insert(scales.begin(), 1.0);

  json sweep = json::array();
  std::optional<double> max_c0;
  for (double s : scales) {
    const std::vector<double> mu = scaled(s);
    json row{{"mu_scale", s}, {"mu", mu}};
    try {
      const C0Result r = find_c0(cfg.model, cfg.kernels, mu, cfg.L, cfg.tol_c, cfg.opts);
      row["c0"] = r.c0;
      row["single_sign_change"] = r.single_sign_change;
      row["bracket"] = c0_bracket(r.trace);
      max_c0 = std::max(max_c0.value_or(r.c0), r.c0);
      if (s == 1.0) {
        doc["c0"] = r.c0;
        brackets["c0"] = row["bracket"];
        write_semiwave_csv(out / "semiwave.csv", r.sol);
      }
      log << "mu x " << format_double(s) << ": c0 = " << format_double(r.c0) << "\n";
    } catch (const Error& e) {
      if (e.code() != Errc::J1Violated) throw;
      row["c0"] = "infinite";
      row["reason"] = "J1 violated";
      if (s == 1.0) {
        doc["c0"] = "infinite";
        doc["reason"] = "J1 violated";
      }
      log << "mu x " << format_double(s) << ": c0 infinite (J1 violated)\n";
    }
    if (s != 1.0 || !cfg.mu_sweep.empty()) sweep.push_back(row);
  }
  if (!cfg.mu_sweep.empty()) {
    // keep only the requested scales in the table
    json table = json::array();
    for (const auto& row : sweep)
      if (std::find(cfg.mu_sweep.begin(), cfg.mu_sweep.end(), row["mu_scale"].get<double>()) != cfg.mu_sweep.end())
        table.push_back(row);
    doc["mu_sweep"] = table;
  }

  if (cfg.cstar) {
    try {
      const CStarResult r = estimate_cstar(cfg.model, cfg.kernels, cfg.L_schedule, cfg.c_grid, cfg.opts);
      doc["cstar"] = c_value(r.cstar);
      if (!r.reason.empty()) doc["cstar_reason"] = r.reason;
      doc["cstar_linearized_diagnostic"] = r.linearized ? json(*r.linearized) : json(nullptr);
      if (r.bracket) brackets["cstar"] = {r.bracket->first, r.bracket->second};
      json probes = json::array();
      for (const auto& p : r.probes)
        probes.push_back({{"c", p.c}, {"L", p.L}, {"mid_fraction", p.mid_fraction}, {"exists", p.exists}});
      doc["cstar_probes"] = probes;
      if (max_c0 && std::isfinite(r.cstar)) doc["cstar_minus_max_c0"] = r.cstar - *max_c0;
      log << "C* = " << format_double(r.cstar) << "\n";
    } catch (const Error& e) {
      doc["cstar"] = nullptr;
      doc["cstar_error"] = e.what();
      log << "C* search failed: " << e.what() << "\n";
      status = NumericalFailure;
    }
  }
  doc["brackets"] = brackets;
  write_json(out / "speeds.json", doc);
  return status;
}

int fit(const fs::path& input, const FitConfig& cfg, const fs::path& out, std::ostream& log) {
  const auto trajectories = read_trajectories(input);
  json fits = json::array();
  bool any = false;
  for (const auto& tr : trajectories) {
    json entry{{"series", tr.label}};
    try {
      if (cfg.law == "auto") {
        const LawSelection sel = best_growth_law(tr.t, tr.y, cfg.window);
        entry.update(to_json(sel.fit));
        entry["ambiguous"] = sel.ambiguous;
        json all = json::array();
        for (const auto& f : sel.all) all.push_back(to_json(f));
        entry["candidates"] = all;
      } else {
        entry.update(to_json(fit_growth(tr.t, tr.y, growth_law_from_string(cfg.law), cfg.window)));
      }
      any = true;
      log << tr.label << ": " << entry["model"].get<std::string>() << ", r^2 = "
          << format_double(entry["r_squared"].get<double>()) << "\n";
    } catch (const Error& e) {
      if (e.code() != Errc::InsufficientData) throw;
      entry["error"] = e.what();
      log << tr.label << ": " << e.what() << "\n";
    }
    fits.push_back(entry);
  }
  write_json(out / "fits.json", json{{"input", input.string()}, {"fits", fits}});
  return any ? Ok : NumericalFailure;
}

int verify(const std::string& suite, std::uint64_t seed, const std::optional<fs::path>& out, std::ostream& log) {
  VerifyOptions opts;
  opts.seed = seed;
  opts.scenario_dir = default_scenario_dir();
  opts.on_result = [&](const CheckResult& r) { log << format_line(r) << std::endl; };
  const auto results = run_suite(suite, opts);
  if (out) write_json(*out / "verify.json", json{{"suite", suite}, {"seed", seed}, {"results", to_json(results)}});
  const bool all = std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.pass; });
  return all ? Ok : ChecksFailed;
}

int run_config(const fs::path& config, Driver driver, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  try {
    const Scenario sc = load_scenario(config, driver);
    fs::create_directories(out);
    switch (driver) {
      case Driver::FreeBoundary: return simulate_fb(sc, out, seed, log);
      case Driver::Cauchy: return simulate_cauchy(sc, out, seed, log);
      case Driver::Speeds: return speeds(sc, out, log);
    }
  } catch (const ConfigError& e) {
    log << config.string() << ": invalid config at " << e.pointer() << ": " << e.what() << "\n";
    return BadConfig;
  } catch (const Error& e) {
    log << config.string() << ": " << e.what() << "\n";
    return NumericalFailure;
  }
  return Ok;
}

int sweep(const std::vector<fs::path>& configs, Driver driver, const fs::path& out, int jobs, std::uint64_t seed,
          std::ostream& log) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(configs.size())));
  std::vector<int> codes(configs.size(), Ok);
  std::vector<std::string> logs(configs.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    // the runs themselves are the parallelism; keep each one serial inside
    if (jobs > 1) omp_set_num_threads(1);
    for (size_t k; (k = next.fetch_add(1)) < configs.size();) {
      std::ostringstream os;
      const fs::path dir = out / configs[k].stem();
      codes[k] = run_config(configs[k], driver, dir, seed, os);
      std::lock_guard lock(log_mutex);
      log << "[" << configs[k].stem().string() << "] " << os.str() << std::flush;
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace nlfb::cli
