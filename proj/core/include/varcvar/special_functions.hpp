#pragma once

namespace varcvar {

// Modified Bessel functions of the second kind, orders 0..2.
// The `_scaled` variants return e^x K_n(x) and stay finite for large x.
// All throw std::domain_error for x <= 0.
double bessel_k0(double x);
double bessel_k1(double x);
double bessel_k2(double x);
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);
double bessel_k2_scaled(double x);

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of the standard normal distribution function on (0, 1).
// Rational first guess refined by one Halley step; relative error < 1e-9.
double inverse_normal_cdf(double p);

}  // namespace varcvar
