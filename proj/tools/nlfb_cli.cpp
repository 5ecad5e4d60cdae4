#include <iostream>
#include <omp.h>

#include "CLI11.hpp"
#include "drivers.hpp"
#include "nlfb/errors.hpp"
#include "nlfb/verify.hpp"

using namespace nlfb;
namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal free-boundary spreading simulations and checks"};
  app.require_subcommand(1);

  fs::path config, out = "out";
  int jobs = 0;
  std::uint64_t seed = 7;
  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "scenario JSON file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory")->capture_default_str();
    sub->add_option("--jobs", jobs, "worker threads (0 = runtime default)");
    sub->add_option("--seed", seed, "seed for sampled checks")->capture_default_str();
  };

  auto* fb = app.add_subcommand("simulate-fb", "free-boundary problem on [g(t), h(t)]");
  common(fb, true);
  auto* cauchy = app.add_subcommand("simulate-cauchy", "whole-line problem and its level sets");
  common(cauchy, true);
  auto* sp = app.add_subcommand("speeds", "semi-wave speed c0 and traveling-wave speed C*");
  common(sp, true);

  auto* fit = app.add_subcommand("fit", "fit growth laws to fronts.csv or levels.csv");
  fs::path input;
  std::string law = "auto";
  std::vector<double> window;
  fit->add_option("--input", input, "fronts.csv or levels.csv")->required()->check(CLI::ExistingFile);
  fit->add_option("--law", law, "auto|linear|tlogt|power")
      ->check(CLI::IsMember({"auto", "linear", "tlogt", "power"}))
      ->capture_default_str();
  fit->add_option("--window", window, "fit window: t_start t_end")->expected(2);
  fit->add_option("--out", out, "output directory")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run a check suite");
  std::string suite = "acceptance";
  ver->add_option("--suite", suite, "suite name")->check(CLI::IsMember(suite_names()))->capture_default_str();
  bool write_out = false;
  ver->add_flag("--write", write_out, "write verify.json to --out");
  common(ver, false);

  auto* sw = app.add_subcommand("sweep", "run many configs concurrently");
  std::vector<fs::path> configs;
  std::string driver_name = "fb";
  sw->add_option("configs", configs, "scenario files")->required()->check(CLI::ExistingFile);
  sw->add_option("--driver", driver_name, "fb|cauchy|speeds")
      ->check(CLI::IsMember({"fb", "cauchy", "speeds"}))
      ->capture_default_str();
  sw->add_option("--out", out, "output directory")->capture_default_str();
  sw->add_option("--jobs", jobs, "concurrent runs")->capture_default_str();
  sw->add_option("--seed", seed, "seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; bad arguments share the bad-config code
    return app.exit(e) == 0 ? cli::Ok : cli::BadConfig;
  }
  if (jobs > 0 && !sw->parsed()) omp_set_num_threads(jobs);

  try {
    if (fb->parsed()) return cli::run_config(config, Driver::FreeBoundary, out, seed, std::cerr);
    if (cauchy->parsed()) return cli::run_config(config, Driver::Cauchy, out, seed, std::cerr);
    if (sp->parsed()) return cli::run_config(config, Driver::Speeds, out, seed, std::cerr);
    if (fit->parsed()) {
      FitConfig fc;
      fc.law = law;
      if (!window.empty()) fc.window = Window{window[0], window[1]};
      return cli::fit(input, fc, out, std::cout);
    }
    if (ver->parsed()) {
      std::optional<fs::path> dest;
      if (write_out) dest = out;
      return cli::verify(suite, seed, dest, std::cout);
    }
    if (sw->parsed()) {
      const Driver d = driver_name == "fb" ? Driver::FreeBoundary
                       : driver_name == "cauchy" ? Driver::Cauchy
                                                 : Driver::Speeds;
      return cli::sweep(configs, d, out, jobs > 0 ? jobs : 1, seed, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid input at " << e.pointer() << ": " << e.what() << "\n";
    return cli::BadConfig;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == Errc::InvalidArgument || e.code() == Errc::ParseError ? cli::BadConfig
                                                                              : cli::NumericalFailure;
  }
  return cli::Ok;
}
