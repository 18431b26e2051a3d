#include "varcvar/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "varcvar/is_esscher.hpp"
#include "varcvar/naive_estimator.hpp"

namespace varcvar {

namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

RunOptions run_options(const RunConfig& cfg, double alpha, std::size_t n_steps) {
  RunOptions o;
  o.alpha = alpha;
  o.n_steps = n_steps;
  o.schedule = cfg.schedule;
  o.pilot_size = cfg.pilot_size;
  o.burn_in = cfg.burn_in;
  o.c_start = cfg.c_start;
  o.ci_level = cfg.ci_level;
  return o;
}

}  // namespace

RunResult run_single(const LossModel& model, const RunConfig& cfg, IsMode mode, double alpha,
                     std::size_t n_steps, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  RunResult out;
  TwoPhaseOptions two;
  two.run = run_options(cfg, alpha, n_steps);
  two.phase1_steps = cfg.phase1_steps;
  two.mode = cfg.phase2_mode;
  switch (mode) {
    case IsMode::none: {
      NaiveReport r = run_naive(model, two.run, rng);
      static_cast<NaiveReport&>(out.report) = std::move(r);
      out.report.theta.assign(model.dim(), 0.0);
      out.report.mu.assign(model.dim(), 0.0);
      break;
    }
    case IsMode::translation:
      out.report = run_translation(model, two, rng);
      break;
    case IsMode::esscher: {
      const auto* nig = dynamic_cast<const NigCallModel*>(&model);
      if (!nig) throw ConfigError("is_mode", "esscher needs the nig_call model");
      out.report = run_esscher(*nig, two, cfg.esscher, rng);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

std::uint64_t replication_seed(std::uint64_t master, std::size_t cell, std::size_t rep, std::size_t kind) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(cell) + 0x100000001b3ULL));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(rep) * 2 + kind));
  return h;
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& task) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        if (failed.load()) return;
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
          failed = true;
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

Table run_table(const RunConfig& cfg) {
  cfg.validate();
  const auto model = make_model(cfg.model, Psi::from_name(cfg.psi));
  const std::size_t R = cfg.replications;
  // The naive reference runs are only needed for variance ratios.
  const bool with_reference = R > 1 && cfg.is_mode != IsMode::none;
  const std::size_t kinds = with_reference ? 2 : 1;

  struct Cell {
    double alpha;
    std::size_t n_steps;
  };
  std::vector<Cell> cells;
  for (auto n : cfg.n_steps)
    for (double a : cfg.alphas) cells.push_back({a, n});

  const std::size_t total = cells.size() * R * kinds;
  std::vector<RunResult> results(total);
  parallel_for(total, cfg.workers, [&](std::size_t i) {
    const std::size_t kind = i % kinds;
    const std::size_t rep = (i / kinds) % R;
    const std::size_t cell = i / (kinds * R);
    Rng rng(replication_seed(cfg.seed, cell, rep, kind));
    const IsMode mode = kind == 0 ? cfg.is_mode : IsMode::none;
    results[i] = run_single(*model, cfg, mode, cells[cell].alpha, cells[cell].n_steps, rng);
  });

  Table table;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto at = [&](std::size_t rep, std::size_t kind) -> const RunResult& {
      return results[(c * R + rep) * kinds + kind];
    };
    const RunResult& first = at(0, 0);
    const ISReport& r = first.report;
    TableRow row;
    row.model = std::string(model->id());
    row.alpha = cells[c].alpha;
    row.n_steps = cells[c].n_steps;
    row.seed = cfg.seed;
    row.var_hat = r.var_hat;
    row.cvar_hat = r.cvar_hat;
    row.sigma_n = r.sigma_n;
    row.ci_low = r.ci_low;
    row.ci_high = r.ci_high;
    row.tail_hits = r.n_tail_hits;
    row.wall_time_ms = cfg.record_wall_time ? first.wall_time_ms : 0.0;
    row.theta_norm = norm2(r.theta);
    row.mu_norm = norm2(r.mu);

    std::vector<double> v_is, c_is, v_nv, c_nv;
    for (std::size_t rep = 0; rep < R; ++rep) {
      v_is.push_back(at(rep, 0).report.var_hat);
      c_is.push_back(at(rep, 0).report.cvar_hat);
      if (with_reference) {
        v_nv.push_back(at(rep, 1).report.var_hat);
        c_nv.push_back(at(rep, 1).report.cvar_hat);
      }
    }
    row.var_mean = std::accumulate(v_is.begin(), v_is.end(), 0.0) / static_cast<double>(R);
    row.cvar_mean = std::accumulate(c_is.begin(), c_is.end(), 0.0) / static_cast<double>(R);
    if (R > 1) {
      row.var_sd = std::sqrt(sample_variance(v_is));
      row.cvar_sd = std::sqrt(sample_variance(c_is));
    }
    if (with_reference) {
      row.vr_var = sample_variance(v_nv) / sample_variance(v_is);
      row.vr_cvar = sample_variance(c_nv) / sample_variance(c_is);
    }
    table.rows.push_back(row);
  }
  return table;
}

namespace {
std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}
std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : "n/a"; }
}  // namespace

void write_csv(std::ostream& os, const Table& t) {
  os << "model,alpha,n_steps,seed,var_hat,cvar_hat,sigma_n,ci_low,ci_high,tail_hits,wall_time_ms,"
        "theta_norm,mu_norm,vr_var,vr_cvar,var_mean,cvar_mean,var_sd,cvar_sd\n";
  for (const auto& r : t.rows) {
    os << r.model << ',' << num(r.alpha) << ',' << r.n_steps << ',' << r.seed << ',' << num(r.var_hat) << ','
       << num(r.cvar_hat) << ',' << num(r.sigma_n) << ',' << num(r.ci_low) << ',' << num(r.ci_high) << ','
       << r.tail_hits << ',' << num(r.wall_time_ms) << ',' << num(r.theta_norm) << ',' << num(r.mu_norm) << ','
       << opt_num(r.vr_var) << ',' << opt_num(r.vr_cvar) << ',' << num(r.var_mean) << ',' << num(r.cvar_mean)
       << ',' << num(r.var_sd) << ',' << num(r.cvar_sd) << '\n';
  }
}

std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace varcvar
