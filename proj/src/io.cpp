#include "nlfb/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nlfb/errors.hpp"

namespace nlfb {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

json json_number(double v) {
  if (std::isinf(v)) return v > 0 ? "infinite" : "-infinite";
  if (std::isnan(v)) return nullptr;
  return v;
}

void write_fronts_csv(const std::filesystem::path& path, const FrontSeries& series) {
  auto out = open_out(path);
  out << "t,g,h\n";
  for (const auto& s : series.samples)
    out << format_double(s.t) << ',' << format_double(s.g) << ',' << format_double(s.h) << '\n';
}

void write_snapshots_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snapshots, int m) {
  auto out = open_out(path);
  out << "t,x";
  for (int i = 1; i <= m; ++i) out << ",u" << i;
  out << '\n';
  for (const auto& snap : snapshots) {
    const GridFunction& u = snap.u;
    for (size_t n = 0; n < u.size(); ++n) {
      out << format_double(snap.t) << ',' << format_double(u.x(n));
      for (const auto& comp : u.values) out << ',' << format_double(comp[n]);
      out << '\n';
    }
  }
}

void write_levels_csv(const std::filesystem::path& path, const std::vector<LevelSample>& levels) {
  auto out = open_out(path);
  out << "t,i,lambda,x_minus,x_plus\n";
  for (const auto& l : levels) {
    out << format_double(l.t) << ',' << l.component + 1 << ',' << format_double(l.lambda) << ',';
    if (l.x_minus) out << format_double(*l.x_minus);
    out << ',';
    if (l.x_plus) out << format_double(*l.x_plus);
    out << '\n';
  }
}

void write_semiwave_csv(const std::filesystem::path& path, const SemiWaveSolution& sol) {
  auto out = open_out(path);
  out << "# c=" << format_double(sol.c) << ", L=" << format_double(sol.L)
      << ", residual=" << format_double(sol.residual) << '\n';
  out << 'x';
  for (size_t i = 1; i <= sol.phi.size(); ++i) out << ",phi_" << i;
  out << '\n';
  for (size_t k = 0; k < sol.x.size(); ++k) {
    out << format_double(sol.x[k]);
    for (const auto& comp : sol.phi) out << ',' << format_double(comp[k]);
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

json to_json(const OutcomeThresholds& th) {
  return json{{"growth_factor", th.growth_factor},
              {"spread_fraction", th.spread_fraction},
              {"vanish_fraction", th.vanish_fraction},
              {"vanish_increment", th.vanish_increment},
              {"final_window", th.final_window}};
}

json to_json(const FitReport& fit) {
  json params{{"coefficient", fit.coefficient}, {"intercept", fit.intercept}};
  if (fit.exponent) params["exponent"] = *fit.exponent;
  return json{{"model", to_string(fit.model)},
              {"params", params},
              {"r_squared", fit.r_squared},
              {"window", {fit.t_start, fit.t_end}},
              {"slope_stderr", fit.slope_stderr},
              {"rmse", fit.rmse},
              {"n", fit.n}};
}

}  // namespace nlfb
