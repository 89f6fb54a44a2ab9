#pragma once

#include <cmath>
#include <sstream>
#include <string_view>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "rcp/error.hpp"

namespace rcp::detail {

// Adaptive Gauss-Kronrod on a finite interval with a smooth integrand.
template <class F>
double integrate_smooth(F&& f, double a, double b, double rel_tol, std::string_view what) {
  if (a == b) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  // Boost 1.74 compares the tolerance with an error measured on the [-1,1]
  // reference interval, so short intervals never terminate. Integrating over
  // [0,1] keeps both on the same scale.
  const double width = b - a;
  auto unit = [&](double u) { return width * f(a + u * width); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      unit, 0.0, 1.0, 20, rel_tol, &err, &l1);
  err *= 0.5;
  if (!std::isfinite(value) || err > 10.0 * rel_tol * l1 + 1e-300) {
    std::ostringstream os;
    os << what << ": Gauss-Kronrod did not converge on [" << a << ", " << b
       << "], value=" << value << " error estimate=" << err << " |f|_1=" << l1;
    throw NumericError(os.str());
  }
  return value;
}

// Tanh-sinh on (a,b) for integrands with integrable endpoint singularities.
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol, std::string_view what) {
  // integrate() is not const-callable in Boost 1.74.
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  double err = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value = integrator.integrate(f, a, b, rel_tol, &err, &l1, &levels);
  if (!std::isfinite(value) || err > 1e3 * rel_tol * l1 + 1e-300) {
    std::ostringstream os;
    os << what << ": tanh-sinh did not converge on (" << a << ", " << b << "), value=" << value
       << " error estimate=" << err << " |f|_1=" << l1 << " levels=" << levels;
    throw NumericError(os.str());
  }
  return value;
}

}  // namespace rcp::detail
