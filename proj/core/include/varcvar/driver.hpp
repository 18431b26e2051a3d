#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varcvar/config.hpp"
#include "varcvar/is_translation.hpp"
#include "varcvar/loss_models.hpp"
#include "varcvar/rng.hpp"

namespace varcvar {

// One estimation run (Phase I + II for the IS modes).
struct RunResult {
  ISReport report;
  double wall_time_ms = 0.0;
};

RunResult run_single(const LossModel& model, const RunConfig& cfg, IsMode mode, double alpha,
                     std::size_t n_steps, Rng& rng);

struct TableRow {
  std::string model;
  double alpha = 0.0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  double var_hat = 0.0;
  double cvar_hat = 0.0;
  double sigma_n = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t tail_hits = 0;
  double wall_time_ms = 0.0;
  double theta_norm = 0.0;
  double mu_norm = 0.0;
  std::optional<double> vr_var;   // empty when R == 1
  std::optional<double> vr_cvar;
  // Across replications of the primary run.
  double var_mean = 0.0;
  double cvar_mean = 0.0;
  double var_sd = 0.0;
  double cvar_sd = 0.0;
};

struct Table {
  std::vector<TableRow> rows;
};

// Seed of replication `rep` for grid cell `cell`; `kind` separates the IS
// run from its naive reference.
std::uint64_t replication_seed(std::uint64_t master, std::size_t cell, std::size_t rep, std::size_t kind);

// Runs tasks [0, count) on `workers` threads; the first exception is rethrown
// after all workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task);

Table run_table(const RunConfig& cfg);

void write_csv(std::ostream& os, const Table& table);
std::string to_csv(const Table& table);

// Sample variance across replications; NaN for fewer than two values.
double sample_variance(const std::vector<double>& v);

}  // namespace varcvar
