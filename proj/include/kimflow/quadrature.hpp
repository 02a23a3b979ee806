#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "kimflow/common.hpp"

namespace kimflow {

// Grid-doubling controls shared by every quadrature-backed constant.
struct QuadratureSpec {
  int grid = 4096;          // initial panel count (forced even)
  int refine_factor = 2;    // grid multiplier per refinement
  double rel_tol = 1e-6;    // relative agreement between successive grids
  int max_refinements = 6;  // give up (loudly) after this many refinements
};

// Composite Simpson on n panels (n even) over [a, b].
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n) {
  if (n < 2) n = 2;
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  double odd = 0.0, even = 0.0;
  for (int i = 1; i < n; i += 2) odd += f(a + i * h);
  for (int i = 2; i < n; i += 2) even += f(a + i * h);
  return h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b));
}

// Simpson with grid doubling until two successive grids agree to rel_tol.
inline double integrate_to_tol(const std::function<double(double)>& f,
                               double a, double b, const QuadratureSpec& q) {
  if (!(b >= a)) throw DomainError("integrate_to_tol: b < a");
  if (a == b) return 0.0;
  int n = q.grid;
  double prev = simpson(f, a, b, n);
  for (int r = 0; r < q.max_refinements; ++r) {
    n *= std::max(2, q.refine_factor);
    const double cur = simpson(f, a, b, n);
    const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= q.rel_tol * scale) return cur;
    prev = cur;
  }
  throw QuadratureError("quadrature did not converge to rel_tol " +
                        std::to_string(q.rel_tol) + " within " +
                        std::to_string(q.max_refinements) + " refinements");
}

// Cumulative Simpson antiderivative F(x_k) = int_a^{x_k} f on a uniform grid
// of n panels (n even); returns values at every second node, i.e. at
// a + 2h, a + 4h, ..., b, plus F(a) = 0 in slot 0. Node spacing pairs panels.
inline std::vector<double> cumulative_simpson(
    const std::function<double(double)>& f, double a, double b, int n) {
  if (n < 2) n = 2;
  if (n % 2 == 1) ++n;
  const double h = (b - a) / n;
  std::vector<double> out(static_cast<std::size_t>(n / 2) + 1, 0.0);
  double acc = 0.0;
  double f0 = f(a);
  for (int k = 0; k < n / 2; ++k) {
    const double x0 = a + 2.0 * k * h;
    const double f1 = f(x0 + h);
    const double f2 = f(x0 + 2.0 * h);
    acc += h / 3.0 * (f0 + 4.0 * f1 + f2);
    out[static_cast<std::size_t>(k) + 1] = acc;
    f0 = f2;
  }
  return out;
}

}  // namespace kimflow
