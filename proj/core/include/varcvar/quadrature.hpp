#pragma once

#include <functional>

namespace varcvar {

// Adaptive Gauss-Kronrod integral of f over [lo, hi]; either bound may be
// infinite. Throws std::runtime_error if the error estimate stays above
// max(abs_tol, rel_tol * integral of |f|) after the maximum subdivision depth.
double integrate(const std::function<double(double)>& f, double lo, double hi,
                 double abs_tol = 1e-10, double rel_tol = 1e-11);

}  // namespace varcvar
