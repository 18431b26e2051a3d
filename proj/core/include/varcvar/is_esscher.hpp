#pragma once

#include <cstddef>
#include <optional>

#include "varcvar/distributions.hpp"
#include "varcvar/is_translation.hpp"
#include "varcvar/naive_estimator.hpp"
#include "varcvar/loss_models.hpp"
#include "varcvar/rng.hpp"

namespace varcvar {

// Update functions under exponential tilting of a NIG input. Each takes a
// draw from the tilted law named in the comment.
// x_tilted ~ X^(theta)
double l1_es(const NigCallModel& model, double xi, double theta, double x_tilted, double alpha);
// x_tilted ~ X^(mu)
double l2_es(const NigCallModel& model, double xi, double C, double mu, double x_tilted, double alpha);
// x_neg ~ X^(-theta)
double l3_es(const NigCallModel& model, double xi, double theta, double x_neg);
// x_neg ~ X^(-mu); lambda from |Psi(phi(x))| <= C e^{(lambda/4)|x|}
double l4_es(const NigCallModel& model, double xi, double mu, double x_neg, double lambda);

// How the four tilted draws of one iteration share randomness.
//   common: one noise triple mapped through all four tilts
//   independent: a fresh triple per tilt
enum class DrawCoupling { common, independent };

struct EsscherOptions {
  double lambda = 4.0;
  DrawCoupling coupling = DrawCoupling::common;
  // Tilts are kept in [-(h - eps), h - eps], h = alpha - |beta|, eps = margin * 2h.
  // Right at the edge the tilted law degenerates (gamma -> 0) and grad psi
  // blows up, so stay a little inside.
  double domain_margin = 0.01;
};

// Interval in which both theta and -theta are admissible tilts.
EsscherDomain symmetric_domain(const NigParams& params);

// alpha-quantile of the loss from a pilot drawn under the tilt theta,
// reweighted back to the original law.
PilotStart esscher_pilot_start(const NigCallModel& model, double alpha, double theta, std::size_t size, Rng& rng);
double esscher_pilot_quantile(const NigCallModel& model, double alpha, double theta, std::size_t size, Rng& rng);

struct EsscherPhase1Result {
  double xi_hat = 0.0;
  double theta_hat = 0.0;
  double mu_hat = 0.0;
  std::size_t clamp_events = 0;
  double remainder_ratio = 0.0;
};

EsscherPhase1Result run_phase1_esscher(const NigCallModel& model, const Phase1Options& p1,
                                       const EsscherOptions& es, Rng& rng);

ISReport run_combined_esscher(const NigCallModel& model, const RunOptions& options, double theta0, double mu0,
                              Phase2Mode mode, const EsscherOptions& es, Rng& rng);

ISReport run_esscher(const NigCallModel& model, const TwoPhaseOptions& options, const EsscherOptions& es,
                     Rng& rng);

}  // namespace varcvar
