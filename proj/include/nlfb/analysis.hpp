#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlfb/fb_sim.hpp"

namespace nlfb {

enum class GrowthLaw { Linear, TLogT, Power };
std::string to_string(GrowthLaw law);
GrowthLaw growth_law_from_string(const std::string& name);

/// Fit of y(t) against one growth law on a time window.
///   linear: y = coefficient * t + intercept
///   tlogt:  y = coefficient * t ln t + intercept
///   power:  ln y = exponent * ln t + ln coefficient
/// r_squared is measured on y for every law so the three are comparable.
struct FitReport {
  GrowthLaw model = GrowthLaw::Linear;
  double coefficient = 0.0;
  std::optional<double> exponent;
  double intercept = 0.0;
  double r_squared = 0.0;
  /// Standard error of the slope parameter (coefficient, or exponent for power).
  double slope_stderr = 0.0;
  double rmse = 0.0;
  double t_start = 0.0, t_end = 0.0;
  std::size_t n = 0;
};

using Window = std::pair<double, double>;

/// Default window is [t_last / 2, t_last]. Error{InsufficientData} with fewer
/// than 20 samples in the window, or t <= 1 for tlogt/power.
FitReport fit_growth(std::span<const double> t, std::span<const double> y, GrowthLaw law,
                     std::optional<Window> window = std::nullopt);

/// fit_growth on h(t) of the series.
FitReport fit_front(const FrontSeries& series, GrowthLaw law, std::optional<Window> window = std::nullopt);

struct LawSelection {
  GrowthLaw model = GrowthLaw::Linear;
  FitReport fit;
  std::vector<FitReport> all;
  /// Runner-up within 1e-4 in r^2.
  bool ambiguous = false;
};

/// Highest r^2 among the three laws; ties resolved in the order linear, tlogt, power.
LawSelection best_growth_law(std::span<const double> t, std::span<const double> y,
                             std::optional<Window> window = std::nullopt);
LawSelection best_growth_law(const FrontSeries& series, std::optional<Window> window = std::nullopt);

struct OrderReport {
  bool ordered = true;
  std::size_t samples_checked = 0;
  std::size_t nodes_checked = 0;
  std::optional<std::string> first_violation;
};

/// Checks h_a <= h_b and g_a >= g_b at every sample and u_a <= u_b + tol at
/// every node of every common snapshot (nodes outside b's range compare
/// against 0). Error{GridMismatch} when sample times or dx differ.
OrderReport compare_orderings(const FrontSeries& a, const FrontSeries& b, double tol = 0.0);

}  // namespace nlfb
