#ifndef DDPUT_TESTS_ORACLES_HPP
#define DDPUT_TESTS_ORACLES_HPP

// Independent numerical oracles for the tests. Nothing here goes through the
// closed forms under test.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ddput::oracle {

/// Plain bisection on a sign-changing bracket.
inline double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0) throw std::invalid_argument("bisect: no sign change");
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Adaptive Gauss-Kronrod (61 points) on [a, b]; b may be +infinity.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0;
  return gauss_kronrod<double, 61>::integrate(f, a, b, 25, tol, &err);
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace ddput::oracle

#endif
