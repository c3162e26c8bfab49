#pragma once

// Scalar root finders and a bracketed maximizer shared by the PV model.

#include <cmath>
#include <cstddef>
#include <utility>

namespace pvgrid::roots {

struct Result {
  double x = 0.0;
  double fx = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Plain bisection on [lo, hi]. f(lo) and f(hi) must differ in sign (or one be zero).
/// Stops when the bracket is narrower than xtol or |f| <= ftol.
template <typename F>
Result bisect(F&& f, double lo, double hi, double xtol, double ftol, std::size_t max_iter = 200) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return {lo, 0.0, 0, true};
  if (fhi == 0.0) return {hi, 0.0, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) return {lo, flo, 0, false};

  Result r;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    r.x = mid;
    r.fx = fmid;
    if (std::abs(fmid) <= ftol || (hi - lo) <= xtol) {
      r.converged = true;
      return r;
    }
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  r.iterations = max_iter;
  return r;
}

/// Newton iteration safeguarded by a bracket: any step that leaves (lo, hi) or is
/// not finite is replaced by a bisection step. The bracket is tightened each
/// iteration from the sign of f so convergence is guaranteed for continuous f.
/// Converged when |f(x)| <= ftol.
template <typename F, typename DF>
Result newton_bisect(F&& f, DF&& df, double lo, double hi, double x0, double ftol,
                     std::size_t max_iter = 100) {
  double flo = f(lo);
  const double fhi = f(hi);
  if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0) return {x0, flo, 0, false};
  const bool rising = flo < fhi;

  double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
  Result r;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    const double fx = f(x);
    r.x = x;
    r.fx = fx;
    if (std::abs(fx) <= ftol) {
      r.converged = true;
      return r;
    }
    if ((fx < 0.0) == rising) {
      lo = x;
    } else {
      hi = x;
    }
    const double slope = df(x);
    double next = x - fx / slope;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (next == x) {
      // Bracket collapsed to adjacent doubles; x is as good as it gets.
      r.converged = std::abs(fx) <= ftol * 16.0;
      return r;
    }
    x = next;
  }
  r.iterations = max_iter;
  return r;
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <typename F>
Result golden_section_max(F&& f, double lo, double hi, double xtol, std::size_t max_iter = 500) {
  constexpr double inv_phi = 0.6180339887498948482;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  Result r;
  for (r.iterations = 1; r.iterations <= max_iter; ++r.iterations) {
    if ((b - a) <= xtol) {
      r.converged = true;
      break;
    }
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc >= fd) {
    r.x = c;
    r.fx = fc;
  } else {
    r.x = d;
    r.fx = fd;
  }
  return r;
}

}  // namespace pvgrid::roots
