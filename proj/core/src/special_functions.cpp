#include "varcvar/special_functions.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace varcvar {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;

void require_positive(double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: argument must be positive");
}

// Ascending series, accurate for 0 < x <= 2.
std::pair<double, double> k01_series(double x) {
  const double t = 0.25 * x * x;
  const double log_half = std::log(0.5 * x);

  double i0 = 0.0, i1 = 0.0, s0 = 0.0, s1 = 0.0;
  double term0 = 1.0;  // t^k / (k!)^2
  double term1 = 1.0;  // t^k / (k! (k+1)!)
  double harmonic = 0.0;  // H_k
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      term0 *= t / (double(k) * k);
      term1 *= t / (double(k) * (k + 1));
      harmonic += 1.0 / k;
    }
    const double harmonic_next = harmonic + 1.0 / (k + 1);
    i0 += term0;
    i1 += term1;
    s0 += harmonic * term0;
    s1 += (harmonic + harmonic_next - 2.0 * kEulerGamma) * term1;
    if (term0 < 1e-18 * i0 && term1 < 1e-18 * i1) break;
  }
  i1 *= 0.5 * x;
  const double k0 = -(log_half + kEulerGamma) * i0 + s0;
  const double k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1;
  return {k0, k1};
}

// Steed's continued fraction for e^x K_0 and e^x K_1, x >= 2.
std::pair<double, double> k01_scaled_cf(double x) {
  constexpr double eps = 1e-17;
  const double a1 = 0.25;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d, delh = d;
  double q1 = 0.0, q2 = 1.0;
  double q = a1, c = a1, a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < 10000; ++i) {
    a -= 2 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h *= a1;
  const double k0s = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1s = k0s * (x + 0.5 - h) / x;
  return {k0s, k1s};
}

std::pair<double, double> k01_scaled(double x) {
  require_positive(x);
  if (x <= 2.0) {
    const auto [k0, k1] = k01_series(x);
    const double e = std::exp(x);
    return {k0 * e, k1 * e};
  }
  return k01_scaled_cf(x);
}

std::pair<double, double> k01(double x) {
  require_positive(x);
  if (x <= 2.0) return k01_series(x);
  const auto [k0s, k1s] = k01_scaled_cf(x);
  const double e = std::exp(-x);
  return {k0s * e, k1s * e};
}

}  // namespace

double bessel_k0(double x) { return k01(x).first; }
double bessel_k1(double x) { return k01(x).second; }
double bessel_k2(double x) {
  const auto [k0, k1] = k01(x);
  return k0 + 2.0 * k1 / x;
}

double bessel_k0_scaled(double x) { return k01_scaled(x).first; }
double bessel_k1_scaled(double x) { return k01_scaled(x).second; }
double bessel_k2_scaled(double x) {
  const auto [k0, k1] = k01_scaled(x);
  return k0 + 2.0 * k1 / x;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p must lie in (0, 1)");
  }
  // 1 - p is exact for p >= 0.5; work in the lower tail where erfc is accurate.
  if (p > 0.5) return -inverse_normal_cdf(1.0 - p);
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement against erfc.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace varcvar
