#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "varcvar/loss_models.hpp"
#include "varcvar/naive_estimator.hpp"
#include "varcvar/rng.hpp"
#include "varcvar/sa_engine.hpp"

namespace varcvar {

enum class Phase2Mode { adaptive, frozen };

// Corrected gradient weight e^{-2 rho |theta|^b} / (1 + G(-theta)^{2c}) W(theta, x).
std::vector<double> w_tilde(const LossModel& model, std::span<const double> theta, std::span<const double> x);

// The four update functions of the translated recursion. `x` is a draw of the base law.
double l1(const LossModel& model, double xi, std::span<const double> theta, std::span<const double> x,
          double alpha);
double l2(const LossModel& model, double xi, double C, std::span<const double> mu, std::span<const double> x,
          double alpha);
void l3(const LossModel& model, double xi, std::span<const double> theta, std::span<const double> x,
        std::span<double> out);
void l4(const LossModel& model, double xi, std::span<const double> mu, std::span<const double> x,
        std::span<double> out);

// Warm-up that moves the shifts toward the tail before the estimation run.
struct Phase1Options {
  std::size_t m_steps = 15000;
  ConfidenceSchedule alpha_schedule = ConfidenceSchedule::thirds(0.95, 15000);
  StepSchedule schedule{};
  std::size_t pilot_size = 1000;
  std::optional<double> xi0;
  std::vector<double> theta0;  // empty: zeros
  std::vector<double> mu0;
  bool update_theta = true;
  bool update_mu = true;
  // Re-seed xi_hat with a weighted pilot quantile whenever alpha_n moves up.
  bool restart_at_breakpoints = true;
  bool keep_trace = false;
};

struct Phase1Result {
  double xi_hat = 0.0;
  std::vector<double> theta_hat;
  std::vector<double> mu_hat;
  std::size_t tail_hits = 0;
  // max_n |r_n| (1 - alpha)^2 / |alpha_n - alpha|; never above 1.
  double remainder_ratio = 0.0;
  std::vector<double> xi_trace;
};

// Alpha-quantile of phi(X + theta) under the weights p(X + theta) / p(X):
// the empirical quantile of the base law estimated from shifted draws.
PilotStart weighted_pilot_start(const LossModel& model, double alpha, std::span<const double> theta,
                                std::size_t size, Rng& rng);
double weighted_pilot_quantile(const LossModel& model, double alpha, std::span<const double> theta,
                               std::size_t size, Rng& rng);

// Quantile of a weighted sample: smallest loss with at most 1 - alpha of
// weight (sum of w / n) strictly above it.
double weighted_quantile(std::vector<std::pair<double, double>> loss_weight, double alpha);

Phase1Result run_phase1(const LossModel& model, const Phase1Options& options, Rng& rng);

struct ISReport : NaiveReport {
  std::vector<double> theta;
  std::vector<double> mu;
  std::size_t clamp_events = 0;
};

// Phase II: four-component recursion from the given shifts. With
// Phase2Mode::frozen only (xi, C) move.
ISReport run_combined(const LossModel& model, const RunOptions& options, std::span<const double> theta0,
                      std::span<const double> mu0, Phase2Mode mode, Rng& rng);

// Where Phase II starts its VaR iterate.
//   phase1_xi: xi_hat from the companion
//   weighted_pilot: weighted pilot quantile under the Phase I shift
enum class Phase2Start { phase1_xi, weighted_pilot };

struct TwoPhaseOptions {
  RunOptions run{};
  std::size_t phase1_steps = 15000;
  Phase2Mode mode = Phase2Mode::adaptive;
  Phase2Start start = Phase2Start::weighted_pilot;
  bool restart_at_breakpoints = true;
};

// Phase I with the thirds schedule, then Phase II from (theta_hat, mu_hat);
// xi_0 and C_0 per `start` and run.c_start.
ISReport run_translation(const LossModel& model, const TwoPhaseOptions& options, Rng& rng);

}  // namespace varcvar
