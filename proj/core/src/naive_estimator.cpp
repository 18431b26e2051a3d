#include "varcvar/naive_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "varcvar/special_functions.hpp"

namespace varcvar {

double h1(const LossModel& model, double xi, std::span<const double> x, double alpha) {
  return h1(xi, model.loss(x), alpha);
}

double h2(const LossModel& model, double xi, double C, std::span<const double> x, double alpha) {
  return h2(xi, C, model.loss(x), alpha, model.psi());
}

PilotStart pilot_from_sample(std::vector<std::pair<double, double>> lw, double alpha, const Psi& psi) {
  if (lw.empty()) throw std::invalid_argument("pilot_from_sample: no samples");
  std::sort(lw.begin(), lw.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  const double n = static_cast<double>(lw.size());
  // smallest loss with at most (1 - alpha) n of mass strictly above it;
  // the slack keeps unit weights on rank ceil(alpha n) despite rounding
  const double target = (1.0 - alpha) * n + 1e-9 * n;
  PilotStart out{lw.back().first, 0.0};
  double acc = 0.0;
  for (const auto& [loss, w] : lw) {
    acc += w;
    if (acc > target) {
      out.xi = loss;
      break;
    }
  }
  const double pxi = psi(out.xi);
  double tail = 0.0;
  for (const auto& [loss, w] : lw) {
    if (loss < out.xi) break;
    tail += (psi(loss) - pxi) * w;
  }
  out.c = pxi + tail / (n * (1.0 - alpha));
  return out;
}

PilotStart pilot_start(const LossModel& model, double alpha, std::size_t size, Rng& rng) {
  if (size == 0) throw std::invalid_argument("pilot_start: empty pilot");
  std::vector<double> x(model.dim());
  std::vector<std::pair<double, double>> lw(size);
  for (auto& e : lw) {
    model.distribution().sample(rng, x);
    e = {model.loss(x), 1.0};
  }
  return pilot_from_sample(std::move(lw), alpha, model.psi());
}

double pilot_quantile(const LossModel& model, double alpha, std::size_t size, Rng& rng) {
  return pilot_start(model, alpha, size, rng).xi;
}

PilotStart initial_point(const LossModel& model, const RunOptions& opt, Rng& rng) {
  const bool need_c = !opt.c0 && opt.c_start == CStart::pilot;
  PilotStart p;
  if (!opt.xi0 || need_c) p = pilot_start(model, opt.alpha, opt.pilot_size, rng);
  return {opt.xi0 ? *opt.xi0 : p.xi, opt.c0 ? *opt.c0 : (need_c ? p.c : 0.0)};
}

double sigma_n_estimate(std::span<const double> excess, double alpha) {
  ExcessMoments m;
  for (double e : excess) m.add(e);
  return std::sqrt(m.variance(alpha));
}

double sigma_n_estimate(std::span<const double> xi_prev, std::span<const double> psi_loss, double alpha) {
  if (xi_prev.size() != psi_loss.size()) throw std::invalid_argument("sigma_n_estimate: length mismatch");
  ExcessMoments m;
  for (std::size_t k = 0; k < xi_prev.size(); ++k) m.add(std::max(psi_loss[k] - xi_prev[k], 0.0));
  return std::sqrt(m.variance(alpha));
}

void fill_interval(NaiveReport& report, double ci_level) {
  const double z = inverse_normal_cdf(0.5 + 0.5 * ci_level);
  const double n = static_cast<double>(std::max<std::size_t>(report.n_steps, 1));
  const double half = z * report.sigma_n / std::sqrt(n);
  report.ci_low = report.cvar_hat - half;
  report.ci_high = report.cvar_hat + half;
}

NaiveReport run_naive(const LossModel& model, const RunOptions& opt, Rng& rng) {
  opt.schedule.validate();
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw std::invalid_argument("run_naive: alpha must lie in (0, 1)");
  if (opt.n_steps == 0) throw std::invalid_argument("run_naive: n_steps must be >= 1");
  if (opt.burn_in >= opt.n_steps) throw std::invalid_argument("run_naive: burn_in must be < n_steps");

  NaiveReport rep;
  RiskState& s = rep.state;
  const PilotStart start = initial_point(model, opt, rng);
  s.xi = start.xi;
  s.C = start.c;
  rep.xi0 = s.xi;
  if (opt.keep_trace) rep.xi_trace.reserve(opt.n_steps);

  const Psi& psi = model.psi();
  const double alpha = opt.alpha;
  std::vector<double> x(model.dim());
  ExcessMoments moments;
  std::size_t averaged = 0;

  for (std::size_t n = 1; n <= opt.n_steps; ++n) {
    if (opt.keep_trace) rep.xi_trace.push_back(s.xi);
    if (n > opt.burn_in) {
      ++averaged;
      s.xi_bar = cesaro_update(s.xi_bar, s.xi, averaged);
      s.C_bar = cesaro_update(s.C_bar, s.C, averaged);
    }
    model.distribution().sample(rng, x);
    const double loss = model.loss(x);
    const double psi_loss = psi(loss);
    const bool hit = loss >= s.xi;
    if (hit) ++rep.n_tail_hits;
    moments.add(hit ? psi_loss - s.xi : 0.0);

    const double g = opt.schedule(n);
    const double d_xi = h1(s.xi, loss, alpha);
    const double d_c = s.C - cvar_target(s.xi, psi_loss, hit, 1.0, alpha);
    s.xi -= g * d_xi;
    s.C -= g * d_c;
    require_finite(s.xi, n, "xi");
    require_finite(s.C, n, "C");
  }
  s.n = opt.n_steps;
  s.m1 = moments.m1;
  s.m2 = moments.m2;

  rep.n_steps = opt.n_steps;
  rep.var_hat = s.xi_bar;
  rep.cvar_hat = s.C_bar;
  rep.sigma_n = std::sqrt(moments.variance(alpha));
  fill_interval(rep, opt.ci_level);
  return rep;
}

}  // namespace varcvar
