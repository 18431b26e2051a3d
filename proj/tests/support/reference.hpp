#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "varcvar/distributions.hpp"
#include "varcvar/loss_models.hpp"

namespace ref {

// K_nu(x) from the integral of exp(-x cosh t) cosh(nu t) over t > 0, summed
// by the trapezoid rule in long double. The integrand is entire and decays
// doubly exponentially, so a fine trapezoid is accurate far below 1e-15.
long double bessel_k(int nu, long double x);
// e^x K_nu(x), same method, usable for large x.
long double bessel_k_scaled(int nu, long double x);

// Standard normal pieces from Boost.Math, independent of the core versions.
double norm_pdf(double x);
double norm_cdf(double x);
double norm_quantile(double p);
// E[(X - q)_+] for X ~ N(0, 1).
double normal_partial_expectation(double q);

// Short put: loss >= xi  <=>  x <= threshold (loss decreases in x).
double put_tail_threshold(const varcvar::ShortPutModel& model, double xi);

struct Truth {
  double var, cvar;
};
// Closed form: the tail is {x <= Phi^{-1}(1 - alpha)} and
// E[e^{bx} 1{x <= q}] = e^{b^2/2} Phi(q - b).
Truth short_put_truth(const varcvar::ShortPutModel& model, double alpha);

double mean(std::span<const double> v);
double sample_sd(std::span<const double> v);
// Standard error of the mean.
double std_error(std::span<const double> v);

// phi(x) = f(x[0]) over a 1-d standard Gaussian, with a chosen majorant.
class GaussianMapModel final : public varcvar::LossModel {
 public:
  using Map = double (*)(double);
  GaussianMapModel(Map f, double growth_const, std::string_view id = "gaussian_map",
                   varcvar::Psi psi = varcvar::Psi::identity());
  std::string_view id() const override { return id_; }
  const varcvar::InputDistribution& distribution() const override { return dist_; }
  double loss(std::span<const double> x) const override { return f_(x[0]); }
  double growth(std::span<const double>) const override { return g_; }
  varcvar::GrowthBound growth_bound() const override { return {1.0, 1.0, 1.0}; }

 private:
  Map f_;
  double g_;
  std::string_view id_;
  varcvar::GaussianStd dist_{1};
};

}  // namespace ref
