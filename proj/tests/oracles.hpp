#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's own quadrature.

#include <cmath>
#include <functional>

namespace oracle {

namespace detail {
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                          double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson on [a, b]; split at kinks before calling.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  if (b <= a) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50);
}

/// Simpson over [a, b] split into n equal pieces (for long or peaked integrands).
inline double simpson_pieces(const std::function<double(double)>& f, double a, double b, int n, double tol = 1e-12) {
  double s = 0.0;
  const double w = (b - a) / n;
  for (int i = 0; i < n; ++i) s += simpson(f, a + i * w, a + (i + 1) * w, tol / n);
  return s;
}

}  // namespace oracle
