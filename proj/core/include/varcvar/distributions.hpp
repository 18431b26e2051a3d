#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "varcvar/rng.hpp"

namespace varcvar {

// Largest/smallest arguments for which exp() stays finite and non-zero.
inline constexpr double kMaxLogWeight = 709.0;
inline constexpr double kMinLogWeight = -745.0;

// exp(v) with v clamped to [kMinLogWeight, kMaxLogWeight].
double clamped_exp(double v);

// Law of the structural noise X driving a loss model.
class InputDistribution {
 public:
  virtual ~InputDistribution() = default;

  virtual std::size_t dim() const = 0;
  virtual void sample(Rng& rng, std::span<double> out) const = 0;
  virtual double log_density(std::span<const double> x) const = 0;
  virtual void grad_log_density(std::span<const double> x, std::span<double> out) const = 0;

  // log p(y) - log p(x).
  virtual double log_ratio(std::span<const double> y, std::span<const double> x) const {
    return log_density(y) - log_density(x);
  }

  // Constants (rho, b) such that log p(x) + rho |x|^b is convex, b in [1, 2].
  virtual double rho() const = 0;
  virtual double b() const = 0;

  // e^{-2 rho |theta|^b} p(x-theta)^2 / (p(x) p(x-2theta)) * grad log p(x-2theta),
  // the direction used by the shift updates. Log space throughout.
  virtual void damped_score_weight(std::span<const double> theta, std::span<const double> x,
                                   std::span<double> out) const;
};

// |v|^b with the Euclidean norm.
double norm_pow(std::span<const double> v, double b);

// Standard Gaussian N(0, I_d).
class GaussianStd final : public InputDistribution {
 public:
  explicit GaussianStd(std::size_t dim);

  std::size_t dim() const override { return dim_; }
  void sample(Rng& rng, std::span<double> out) const override;
  double log_density(std::span<const double> x) const override;
  void grad_log_density(std::span<const double> x, std::span<double> out) const override;
  double log_ratio(std::span<const double> y, std::span<const double> x) const override;
  double rho() const override { return 0.5; }
  double b() const override { return 2.0; }
  // All exponentials cancel: 2 theta - x.
  void damped_score_weight(std::span<const double> theta, std::span<const double> x,
                           std::span<double> out) const override;

 private:
  std::size_t dim_;
};

// d i.i.d. standard normal coordinates.
std::vector<double> sample_gaussian(std::size_t dim, Rng& rng);

// p(x + theta) / p(x) = exp(-<theta, x> - |theta|^2 / 2), evaluated in log space.
double gaussian_log_translation_weight(std::span<const double> x, std::span<const double> theta);
double gaussian_translation_weight(std::span<const double> x, std::span<const double> theta);

// Gradient weight W(theta, x) = exp(|theta|^2) (2 theta - x).
std::vector<double> gaussian_W(std::span<const double> theta, std::span<const double> x);

// --- Normal Inverse Gaussian -------------------------------------------------

struct NigParams {
  double alpha = 2.0;   // tail heaviness, > 0
  double beta = 0.2;    // asymmetry, |beta| <= alpha
  double delta = 0.8;   // scale, > 0
  double mu = 0.04;     // location

  double gamma() const;
  // Throws std::invalid_argument on an invalid parameter set.
  void validate() const;
  // Law of the Esscher transform X^(tilt): NIG(alpha, beta + tilt, delta, mu).
  NigParams tilted(double tilt) const;
};

// Open interval of tilts theta with a finite cumulant psi(theta).
struct EsscherDomain {
  double lo;
  double hi;

  bool contains(double theta) const { return theta > lo && theta < hi; }
  // Clamp into [lo + eps, hi - eps] with eps = margin * (hi - lo).
  // Sets *clamped when the value moved.
  double clamp(double theta, double margin, bool* clamped = nullptr) const;
};

EsscherDomain esscher_domain(const NigParams& params);

double nig_density(double x, const NigParams& params);
double nig_log_density(double x, const NigParams& params);
// d/dx log p(x) = beta - alpha (x - mu) / q * K2(alpha q) / K1(alpha q), q = sqrt(delta^2 + (x - mu)^2).
double nig_grad_log_density(double x, const NigParams& params);

// psi(theta) = mu theta + delta (gamma - sqrt(alpha^2 - (beta + theta)^2)) and its derivative.
// Both throw std::domain_error when |beta + theta| >= alpha.
double nig_cumulant(double theta, const NigParams& params);
double nig_cumulant_grad(double theta, const NigParams& params);

// Randomness consumed by one NIG draw. Keeping it separate from the tilt lets
// several tilted draws share the same innovation.
struct NigNoise {
  double chi2;     // square of a standard normal, drives the inverse Gaussian
  double uniform;  // root selection in the inverse Gaussian sampler
  double normal;   // mixture innovation
};

NigNoise draw_nig_noise(Rng& rng);

// NIG(alpha, beta + tilt, delta, mu) as an inverse-Gaussian variance-mean
// mixture: V ~ IG(delta / gamma', delta^2), X = mu + (beta + tilt) V + sqrt(V) Z.
double nig_from_noise(const NigNoise& noise, const NigParams& params, double tilt);

double sample_nig(const NigParams& params, double tilt, Rng& rng);

class NigDistribution final : public InputDistribution {
 public:
  explicit NigDistribution(NigParams params);

  const NigParams& params() const { return params_; }
  EsscherDomain domain() const { return esscher_domain(params_); }

  std::size_t dim() const override { return 1; }
  void sample(Rng& rng, std::span<double> out) const override;
  double log_density(std::span<const double> x) const override;
  void grad_log_density(std::span<const double> x, std::span<double> out) const override;
  // Exponential tails: log p + |x| is the control used for translation.
  double rho() const override { return 1.0; }
  double b() const override { return 1.0; }

 private:
  NigParams params_;
};

}  // namespace varcvar
