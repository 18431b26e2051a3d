#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "varcvar/loss_models.hpp"
#include "varcvar/rng.hpp"
#include "varcvar/sa_engine.hpp"

namespace varcvar {

// Where C_0 comes from when not given explicitly.
//   pilot: CVaR of the same pilot that yields xi_0
//   zero:  C_0 = 0
enum class CStart { pilot, zero };

// Settings shared by every recursion driver.
struct RunOptions {
  double alpha = 0.95;
  std::size_t n_steps = 100000;
  StepSchedule schedule{};
  std::size_t pilot_size = 1000;   // samples for the empirical start (xi_0, C_0)
  std::optional<double> xi0;       // skips the pilot when set
  std::optional<double> c0;        // overrides c_start when set
  CStart c_start = CStart::pilot;
  std::size_t burn_in = 0;         // iterates left out of the averages
  double ci_level = 0.95;
  bool keep_trace = false;         // store xi_0 .. xi_{N-1}
};

struct NaiveReport {
  double var_hat = 0.0;
  double cvar_hat = 0.0;
  double sigma_n = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_steps = 0;
  std::size_t n_tail_hits = 0;
  double xi0 = 0.0;
  RiskState state;             // last iterate
  std::vector<double> xi_trace;  // only with keep_trace
};

// 1 - 1{loss >= xi} / (1 - alpha).
inline double h1(double xi, double loss, double alpha) {
  return 1.0 - (loss >= xi ? 1.0 : 0.0) / (1.0 - alpha);
}
double h1(const LossModel& model, double xi, std::span<const double> x, double alpha);

// xi + (psi_loss - xi) w / (1 - alpha) when hit, xi otherwise.
inline double cvar_target(double xi, double psi_loss, bool hit, double weight, double alpha) {
  return hit ? xi + (psi_loss - xi) * weight / (1.0 - alpha) : xi;
}

// C - w(xi, x).
inline double h2(double xi, double C, double loss, double alpha, const Psi& psi) {
  return C - cvar_target(xi, psi(loss), loss >= xi, 1.0, alpha);
}
double h2(const LossModel& model, double xi, double C, std::span<const double> x, double alpha);

// Alternative companion Psi(loss) 1{loss >= xi} / (1 - alpha); same mean at the root.
inline double w_alt(double xi, double loss, double alpha, const Psi& psi) {
  return loss >= xi ? psi(loss) / (1.0 - alpha) : 0.0;
}

struct PilotStart {
  double xi = 0.0;
  double c = 0.0;
};

// Quantile and CVaR of a weighted sample (weights are likelihood ratios, so
// the empirical law puts mass w/n on each loss). With unit weights the
// quantile has rank ceil(alpha n).
PilotStart pilot_from_sample(std::vector<std::pair<double, double>> loss_weight, double alpha, const Psi& psi);

// Same from `size` fresh draws of the model's input law.
PilotStart pilot_start(const LossModel& model, double alpha, std::size_t size, Rng& rng);
double pilot_quantile(const LossModel& model, double alpha, std::size_t size, Rng& rng);

// (xi_0, C_0) for a run: explicit values win, the pilot fills the rest.
PilotStart initial_point(const LossModel& model, const RunOptions& options, Rng& rng);

// Running estimate of sigma_n^2 from the stream of tail excesses.
double sigma_n_estimate(std::span<const double> excess, double alpha);
double sigma_n_estimate(std::span<const double> xi_prev, std::span<const double> psi_loss, double alpha);

// Confidence bounds cvar_hat -/+ z sigma_n / sqrt(n).
void fill_interval(NaiveReport& report, double ci_level);

NaiveReport run_naive(const LossModel& model, const RunOptions& options, Rng& rng);

}  // namespace varcvar
