#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "nestif/errors.hpp"

namespace nestif::quadrature {

struct Options {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;          // floor for near-zero integrals
  std::int64_t max_evals = 10'000'000;
  int max_depth = 48;
};

namespace detail {

struct Budget {
  std::int64_t remaining;
};

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m,
                    double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adaptive(F& f, double a, double fa, double b, double fb, double m,
                double fm, double whole, double tol, int depth,
                const Options& opt, Budget& budget) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  budget.remaining -= 2;
  if (budget.remaining < 0)
    throw ConvergenceError("adaptive quadrature: evaluation budget exhausted",
                           whole, whole);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_step(f, a, fa, m, fm, lm, flm);
  const double right = simpson_step(f, m, fm, b, fb, rm, frm);
  const double delta = left + right - whole;
  if (depth >= opt.max_depth)
    throw ConvergenceError("adaptive quadrature: max recursion depth reached",
                           left + right, whole);
  // Richardson: Simpson error on the refined pair is ~delta/15.
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1, opt,
                  budget) +
         adaptive(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1, opt,
                  budget);
}

}  // namespace detail

/// Adaptive Simpson integration of f over [lo, hi].
///
/// Converges to roughly rel_tol relative accuracy for smooth integrands;
/// throws ConvergenceError (carrying the best estimates) if the evaluation
/// budget or the recursion depth runs out first.
template <class F>
double integrate(F&& f, double lo, double hi, Options opt = {}) {
  if (lo == hi) return 0.0;
  detail::Budget budget{opt.max_evals};
  const double m = 0.5 * (lo + hi);
  budget.remaining -= 3;
  const double fa = f(lo), fb = f(hi), fm = f(m);
  const double whole = detail::simpson_step(f, lo, fa, hi, fb, m, fm);
  double tol = std::max(opt.abs_tol, std::abs(whole) * opt.rel_tol);
  if (tol == 0.0) tol = opt.rel_tol;  // integrand may still be nonzero inside
  return detail::adaptive(f, lo, fa, hi, fb, m, fm, whole, tol, 0, opt,
                          budget);
}

}  // namespace nestif::quadrature
