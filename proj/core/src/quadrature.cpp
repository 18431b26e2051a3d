#include "varcvar/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace varcvar {

double integrate(const std::function<double(double)>& f, double lo, double hi, double abs_tol,
                 double rel_tol) {
  if (lo == hi) return 0.0;
  if (lo > hi) return -integrate(f, hi, lo, abs_tol, rel_tol);
  double err = 0.0;
  double l1 = 0.0;
  // boost's tolerance is relative to the L1 norm; we want an absolute bound,
  // so ask for something tight and check the estimate afterwards.
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, lo, hi, 15, 1e-13, &err, &l1);
  if (!std::isfinite(value) || err > std::max(abs_tol, rel_tol * l1)) {
    std::ostringstream msg;
    msg << "quadrature did not converge on [" << lo << ", " << hi << "]: error estimate " << err
        << " > " << abs_tol;
    throw std::runtime_error(msg.str());
  }
  return value;
}

}  // namespace varcvar
