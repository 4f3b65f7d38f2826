#ifndef LRD_MINIMIZE_HPP
#define LRD_MINIMIZE_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace lrd {

struct MinimizeResult {
  double x = 0.0;
  double f = 0.0;
  bool interior = true;  // false when the minimizer hit a caller-supplied bound
};

// 1-D minimizer for a strictly convex function: outward bracket doubling from
// a starting guess, then Brent refinement. `lo`/`hi` optionally restrict the
// search to a closed interval.
inline MinimizeResult minimize_convex(const std::function<double(double)>& f, double guess,
                                      std::optional<double> lo = std::nullopt,
                                      std::optional<double> hi = std::nullopt,
                                      double xtol = 1e-10, int max_iter = 200) {
  double a = lo.value_or(guess - 1.0);
  double b = hi.value_or(guess + 1.0);
  if (a > b) throw std::invalid_argument("minimize_convex: empty interval");

  if (!lo || !hi) {
    // expand outward until the midpoint beats both ends (convexity makes this sound)
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
      const double m = 0.5 * (a + b);
      if (f(m) <= std::min(f(a), f(b))) break;
      if (!lo) a -= step;
      if (!hi) b += step;
      step *= 2.0;
    }
  }

  // Brent's method on [a, b]
  const double golden = 0.3819660112501051;
  double x, w, v, fx, fw, fv;
  x = w = v = a + golden * (b - a);
  fx = fw = fv = f(x);
  double d = 0.0, e = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double m = 0.5 * (a + b);
    const double tol1 = xtol * (std::abs(x) + 1e-12);
    if (std::abs(x - m) <= 2.0 * tol1 - 0.5 * (b - a)) break;
    bool parabolic = false;
    if (std::abs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etmp = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * etmp) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < 2.0 * tol1 || b - u < 2.0 * tol1) d = (m > x ? tol1 : -tol1);
        parabolic = true;
      }
    }
    if (!parabolic) {
      e = (x < m ? b : a) - x;
      d = golden * e;
    }
    const double u = x + (std::abs(d) >= tol1 ? d : (d > 0 ? tol1 : -tol1));
    const double fu = f(u);
    if (fu <= fx) {
      if (u < x) b = x; else a = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  MinimizeResult res;
  res.x = x;
  res.f = fx;
  if (lo && std::abs(x - *lo) <= 4.0 * xtol * (std::abs(*lo) + 1e-12)) res.interior = false;
  if (hi && std::abs(x - *hi) <= 4.0 * xtol * (std::abs(*hi) + 1e-12)) res.interior = false;
  return res;
}

}  // namespace lrd

#endif
