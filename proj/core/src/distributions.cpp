#include "varcvar/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "varcvar/special_functions.hpp"

namespace varcvar {

double clamped_exp(double v) { return std::exp(std::clamp(v, kMinLogWeight, kMaxLogWeight)); }

double norm_pow(std::span<const double> v, double b) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (b == 2.0) return sq;
  return std::pow(std::sqrt(sq), b);
}

void InputDistribution::damped_score_weight(std::span<const double> theta, std::span<const double> x,
                                            std::span<double> out) const {
  const std::size_t d = x.size();
  std::vector<double> shifted1(d), shifted2(d);
  for (std::size_t i = 0; i < d; ++i) {
    shifted1[i] = x[i] - theta[i];
    shifted2[i] = x[i] - 2.0 * theta[i];
  }
  const double log_w = -2.0 * rho() * norm_pow(theta, b()) + 2.0 * log_density(shifted1) - log_density(x) -
                       log_density(shifted2);
  grad_log_density(shifted2, out);
  const double w = clamped_exp(log_w);
  for (double& v : out) v *= w;
}

// --- Gaussian ------------------------------------------------------------------

GaussianStd::GaussianStd(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("GaussianStd: dimension must be >= 1");
}

void GaussianStd::sample(Rng& rng, std::span<double> out) const {
  for (double& v : out) v = rng.normal();
}

double GaussianStd::log_density(std::span<const double> x) const {
  double sq = 0.0;
  for (double v : x) sq += v * v;
  return -0.5 * sq - 0.5 * double(x.size()) * std::log(2.0 * std::numbers::pi);
}

void GaussianStd::grad_log_density(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = -x[i];
}

double GaussianStd::log_ratio(std::span<const double> y, std::span<const double> x) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (y[i] - x[i]) * (y[i] + x[i]);
  return -0.5 * acc;
}

void GaussianStd::damped_score_weight(std::span<const double> theta, std::span<const double> x,
                                      std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = 2.0 * theta[i] - x[i];
}

std::vector<double> sample_gaussian(std::size_t dim, Rng& rng) {
  if (dim == 0) throw std::invalid_argument("sample_gaussian: dimension must be >= 1");
  std::vector<double> out(dim);
  for (double& v : out) v = rng.normal();
  return out;
}

double gaussian_log_translation_weight(std::span<const double> x, std::span<const double> theta) {
  double dot = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += theta[i] * x[i];
    sq += theta[i] * theta[i];
  }
  return -dot - 0.5 * sq;
}

double gaussian_translation_weight(std::span<const double> x, std::span<const double> theta) {
  return clamped_exp(gaussian_log_translation_weight(x, theta));
}

std::vector<double> gaussian_W(std::span<const double> theta, std::span<const double> x) {
  double sq = 0.0;
  for (double t : theta) sq += t * t;
  const double scale = clamped_exp(sq);
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = scale * (2.0 * theta[i] - x[i]);
  return out;
}

// --- NIG -------------------------------------------------------------------------

double NigParams::gamma() const { return std::sqrt(alpha * alpha - beta * beta); }

void NigParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("NIG: alpha must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("NIG: delta must be positive");
  if (!(std::abs(beta) <= alpha)) throw std::invalid_argument("NIG: |beta| must not exceed alpha");
  if (!std::isfinite(mu)) throw std::invalid_argument("NIG: mu must be finite");
}

NigParams NigParams::tilted(double tilt) const {
  NigParams p = *this;
  p.beta += tilt;
  return p;
}

double EsscherDomain::clamp(double theta, double margin, bool* clamped) const {
  const double eps = margin * (hi - lo);
  const double out = std::clamp(theta, lo + eps, hi - eps);
  if (clamped) *clamped = (out != theta);
  return out;
}

EsscherDomain esscher_domain(const NigParams& params) {
  return {-params.alpha - params.beta, params.alpha - params.beta};
}

double nig_log_density(double x, const NigParams& p) {
  const double dx = x - p.mu;
  const double q = std::hypot(p.delta, dx);
  const double z = p.alpha * q;
  return std::log(p.alpha * p.delta / std::numbers::pi) + std::log(bessel_k1_scaled(z)) - z -
         std::log(q) + p.delta * p.gamma() + p.beta * dx;
}

double nig_density(double x, const NigParams& params) { return std::exp(nig_log_density(x, params)); }

double nig_grad_log_density(double x, const NigParams& p) {
  const double dx = x - p.mu;
  const double q = std::hypot(p.delta, dx);
  const double z = p.alpha * q;
  return p.beta - p.alpha * dx / q * bessel_k2_scaled(z) / bessel_k1_scaled(z);
}

namespace {
double tilted_gamma(double theta, const NigParams& p) {
  const double b = p.beta + theta;
  if (!(std::abs(b) < p.alpha)) {
    throw std::domain_error("NIG cumulant: tilt " + std::to_string(theta) +
                            " outside the Esscher domain");
  }
  return std::sqrt(p.alpha * p.alpha - b * b);
}
}  // namespace

double nig_cumulant(double theta, const NigParams& p) {
  return p.mu * theta + p.delta * (p.gamma() - tilted_gamma(theta, p));
}

double nig_cumulant_grad(double theta, const NigParams& p) {
  return p.mu + p.delta * (p.beta + theta) / tilted_gamma(theta, p);
}

NigNoise draw_nig_noise(Rng& rng) {
  NigNoise n;
  const double g = rng.normal();
  n.chi2 = g * g;
  n.uniform = rng.uniform();
  n.normal = rng.normal();
  return n;
}

double nig_from_noise(const NigNoise& noise, const NigParams& p, double tilt) {
  const double b = p.beta + tilt;
  const double g = tilted_gamma(tilt, p);
  // Inverse Gaussian IG(m, lambda) by Michael-Schucany-Haas; the two roots
  // multiply to m^2, so take the larger one stably and divide.
  const double m = p.delta / g;
  const double lambda = p.delta * p.delta;
  const double nu = noise.chi2;
  const double big = m + m / (2.0 * lambda) * (m * nu + std::sqrt(4.0 * m * lambda * nu + m * m * nu * nu));
  const double small = m * m / big;
  const double v = (noise.uniform <= m / (m + small)) ? small : big;
  return p.mu + b * v + std::sqrt(v) * noise.normal;
}

double sample_nig(const NigParams& params, double tilt, Rng& rng) {
  return nig_from_noise(draw_nig_noise(rng), params, tilt);
}

NigDistribution::NigDistribution(NigParams params) : params_(params) { params_.validate(); }

void NigDistribution::sample(Rng& rng, std::span<double> out) const {
  out[0] = sample_nig(params_, 0.0, rng);
}

double NigDistribution::log_density(std::span<const double> x) const {
  return nig_log_density(x[0], params_);
}

void NigDistribution::grad_log_density(std::span<const double> x, std::span<double> out) const {
  out[0] = nig_grad_log_density(x[0], params_);
}

}  // namespace varcvar
