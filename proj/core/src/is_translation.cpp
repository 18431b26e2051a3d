#include "varcvar/is_translation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace varcvar {

namespace {

// Scratch space for one evaluation at a shifted point.
struct Shifted {
  std::vector<double> y;
  explicit Shifted(std::size_t d) : y(d) {}

  std::span<const double> at(std::span<const double> x, std::span<const double> shift, double sign) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = x[i] + sign * shift[i];
    return y;
  }
};

double growth_at_minus(const LossModel& model, std::span<const double> v, std::vector<double>& buf) {
  buf.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = -v[i];
  return model.growth(buf);
}

// Tail hit and likelihood ratio of the translated draw x + shift.
struct TiltedLoss {
  double loss;
  double weight;
};

TiltedLoss translated(const LossModel& model, std::span<const double> shift, std::span<const double> x,
                      Shifted& buf) {
  auto y = buf.at(x, shift, 1.0);
  return {model.loss(y), clamped_exp(model.distribution().log_ratio(y, x))};
}

void l3_impl(const LossModel& model, double xi, std::span<const double> theta, std::span<const double> x,
             std::span<double> out, Shifted& buf) {
  auto y = buf.at(x, theta, -1.0);
  if (model.loss(y) >= xi) {
    model.distribution().damped_score_weight(theta, x, out);
  } else {
    for (double& v : out) v = 0.0;
  }
}

void l4_impl(const LossModel& model, double xi, std::span<const double> mu, std::span<const double> x,
             std::span<double> out, Shifted& buf, std::vector<double>& gbuf) {
  auto y = buf.at(x, mu, -1.0);
  const double loss = model.loss(y);
  if (loss < xi) {
    for (double& v : out) v = 0.0;
    return;
  }
  const double ex = model.psi()(loss) - xi;
  const GrowthBound gb = model.growth_bound();
  const double g = growth_at_minus(model, mu, gbuf);
  const double denom = 1.0 + std::pow(g, gb.l4_power) + xi * xi;
  model.distribution().damped_score_weight(mu, x, out);
  const double scale = ex * ex / denom;
  for (double& v : out) v *= scale;
}

}  // namespace

std::vector<double> w_tilde(const LossModel& model, std::span<const double> theta, std::span<const double> x) {
  std::vector<double> out(x.size());
  model.distribution().damped_score_weight(theta, x, out);
  std::vector<double> gbuf;
  const double g = growth_at_minus(model, theta, gbuf);
  const double denom = 1.0 + std::pow(g, 2.0 * model.growth_bound().c);
  for (double& v : out) v /= denom;
  return out;
}

double l1(const LossModel& model, double xi, std::span<const double> theta, std::span<const double> x,
          double alpha) {
  Shifted buf(x.size());
  const auto t = translated(model, theta, x, buf);
  const auto& dist = model.distribution();
  const double damp = std::exp(-dist.rho() * norm_pow(theta, dist.b()));
  return damp * (1.0 - (t.loss >= xi ? t.weight : 0.0) / (1.0 - alpha));
}

double l2(const LossModel& model, double xi, double C, std::span<const double> mu, std::span<const double> x,
          double alpha) {
  Shifted buf(x.size());
  const auto t = translated(model, mu, x, buf);
  return C - cvar_target(xi, model.psi()(t.loss), t.loss >= xi, t.weight, alpha);
}

void l3(const LossModel& model, double xi, std::span<const double> theta, std::span<const double> x,
        std::span<double> out) {
  Shifted buf(x.size());
  l3_impl(model, xi, theta, x, out, buf);
}

void l4(const LossModel& model, double xi, std::span<const double> mu, std::span<const double> x,
        std::span<double> out) {
  Shifted buf(x.size());
  std::vector<double> gbuf;
  l4_impl(model, xi, mu, x, out, buf, gbuf);
}

double weighted_quantile(std::vector<std::pair<double, double>> lw, double alpha) {
  return pilot_from_sample(std::move(lw), alpha, Psi::identity()).xi;
}

PilotStart weighted_pilot_start(const LossModel& model, double alpha, std::span<const double> theta,
                                std::size_t size, Rng& rng) {
  if (size == 0) throw std::invalid_argument("weighted_pilot_start: empty pilot");
  const std::size_t d = model.dim();
  std::vector<double> x(d);
  Shifted buf(d);
  std::vector<std::pair<double, double>> lw(size);
  for (auto& e : lw) {
    model.distribution().sample(rng, x);
    const auto t = translated(model, theta, x, buf);
    e = {t.loss, t.weight};
  }
  return pilot_from_sample(std::move(lw), alpha, model.psi());
}

double weighted_pilot_quantile(const LossModel& model, double alpha, std::span<const double> theta,
                               std::size_t size, Rng& rng) {
  return weighted_pilot_start(model, alpha, theta, size, rng).xi;
}

Phase1Result run_phase1(const LossModel& model, const Phase1Options& opt, Rng& rng) {
  opt.schedule.validate();
  opt.alpha_schedule.validate();
  const std::size_t d = model.dim();
  const double alpha = opt.alpha_schedule.target;

  Phase1Result res;
  res.theta_hat = opt.theta0.empty() ? std::vector<double>(d, 0.0) : opt.theta0;
  res.mu_hat = opt.mu0.empty() ? std::vector<double>(d, 0.0) : opt.mu0;
  if (res.theta_hat.size() != d || res.mu_hat.size() != d)
    throw std::invalid_argument("run_phase1: initial shift has the wrong dimension");
  double xi = opt.xi0 ? *opt.xi0 : pilot_quantile(model, opt.alpha_schedule.at(1), opt.pilot_size, rng);

  std::vector<double> x(d), dir(d);
  Shifted buf(d);
  std::vector<double> gbuf;
  if (opt.keep_trace) res.xi_trace.reserve(opt.m_steps);

  for (std::size_t n = 1; n <= opt.m_steps; ++n) {
    const double a_n = opt.alpha_schedule.at(n);
    if (opt.restart_at_breakpoints && n > 1 && a_n != opt.alpha_schedule.at(n - 1))
      xi = weighted_pilot_quantile(model, a_n, res.theta_hat, opt.pilot_size, rng);
    if (opt.keep_trace) res.xi_trace.push_back(xi);
    model.distribution().sample(rng, x);
    const double loss = model.loss(x);
    const double g = opt.schedule(n);
    const double h_hat = h1(xi, loss, a_n);
    if (loss >= xi) ++res.tail_hits;

    // Remainder against the target-level update; bounded by |a_n - a| / (1 - a)^2.
    const double r = h_hat - h1(xi, loss, alpha);
    if (a_n != alpha) {
      const double bound = std::abs(a_n - alpha) / ((1.0 - alpha) * (1.0 - alpha));
      const double ratio = std::abs(r) / bound;
      res.remainder_ratio = std::max(res.remainder_ratio, ratio);
      if (ratio > 1.0 + 1e-12) throw std::logic_error("run_phase1: remainder exceeds its bound");
    } else if (r != 0.0) {
      throw std::logic_error("run_phase1: non-zero remainder at the target level");
    }

    if (opt.update_theta) {
      l3_impl(model, xi, res.theta_hat, x, dir, buf);
      rm_update(res.theta_hat, g, dir, {}, n);
    }
    if (opt.update_mu) {
      l4_impl(model, xi, res.mu_hat, x, dir, buf, gbuf);
      rm_update(res.mu_hat, g, dir, {}, n);
    }
    xi -= g * h_hat;
    require_finite(xi, n, "xi_hat");
  }
  res.xi_hat = xi;
  return res;
}

ISReport run_combined(const LossModel& model, const RunOptions& opt, std::span<const double> theta0,
                      std::span<const double> mu0, Phase2Mode mode, Rng& rng) {
  opt.schedule.validate();
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw std::invalid_argument("run_combined: alpha must lie in (0, 1)");
  if (opt.n_steps == 0) throw std::invalid_argument("run_combined: n_steps must be >= 1");
  if (opt.burn_in >= opt.n_steps) throw std::invalid_argument("run_combined: burn_in must be < n_steps");
  const std::size_t d = model.dim();
  if (theta0.size() != d || mu0.size() != d) throw std::invalid_argument("run_combined: shift dimension mismatch");

  ISReport rep;
  RiskState& s = rep.state;
  s.theta.assign(theta0.begin(), theta0.end());
  s.mu.assign(mu0.begin(), mu0.end());
  const PilotStart start = initial_point(model, opt, rng);
  s.xi = start.xi;
  s.C = start.c;
  rep.xi0 = s.xi;
  if (opt.keep_trace) rep.xi_trace.reserve(opt.n_steps);

  const auto& dist = model.distribution();
  const Psi& psi = model.psi();
  const double alpha = opt.alpha;
  const bool adaptive = mode == Phase2Mode::adaptive;
  std::vector<double> x(d), dir3(d), dir4(d);
  Shifted buf(d);
  std::vector<double> gbuf;
  ExcessMoments moments;
  std::size_t averaged = 0;

  for (std::size_t n = 1; n <= opt.n_steps; ++n) {
    if (opt.keep_trace) rep.xi_trace.push_back(s.xi);
    if (n > opt.burn_in) {
      ++averaged;
      s.xi_bar = cesaro_update(s.xi_bar, s.xi, averaged);
      s.C_bar = cesaro_update(s.C_bar, s.C, averaged);
    }
    dist.sample(rng, x);

    const auto tv = translated(model, s.theta, x, buf);
    const double damp = std::exp(-dist.rho() * norm_pow(s.theta, dist.b()));
    const bool hit_v = tv.loss >= s.xi;
    if (hit_v) ++rep.n_tail_hits;
    const double d_xi = damp * (1.0 - (hit_v ? tv.weight : 0.0) / (1.0 - alpha));

    const auto tc = translated(model, s.mu, x, buf);
    const double psi_c = psi(tc.loss);
    const bool hit_c = tc.loss >= s.xi;
    moments.add(hit_c ? (psi_c - s.xi) * tc.weight : 0.0);
    const double d_c = s.C - cvar_target(s.xi, psi_c, hit_c, tc.weight, alpha);

    const double g = opt.schedule(n);
    if (adaptive) {
      l3_impl(model, s.xi, s.theta, x, dir3, buf);
      l4_impl(model, s.xi, s.mu, x, dir4, buf, gbuf);
      rm_update(s.theta, g, dir3, {}, n);
      rm_update(s.mu, g, dir4, {}, n);
    }
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
  rep.theta = s.theta;
  rep.mu = s.mu;
  fill_interval(rep, opt.ci_level);
  return rep;
}

ISReport run_translation(const LossModel& model, const TwoPhaseOptions& opt, Rng& rng) {
  Phase1Options p1;
  p1.m_steps = opt.phase1_steps;
  p1.alpha_schedule = ConfidenceSchedule::thirds(opt.run.alpha, opt.phase1_steps);
  p1.schedule = opt.run.schedule;
  p1.pilot_size = opt.run.pilot_size;
  p1.restart_at_breakpoints = opt.restart_at_breakpoints;
  const Phase1Result ph = run_phase1(model, p1, rng);

  RunOptions run = opt.run;
  if (opt.start == Phase2Start::phase1_xi) {
    run.xi0 = ph.xi_hat;
  } else if (!run.xi0) {
    const PilotStart p = weighted_pilot_start(model, run.alpha, ph.theta_hat, run.pilot_size, rng);
    run.xi0 = p.xi;
    if (!run.c0 && run.c_start == CStart::pilot) run.c0 = p.c;
  }
  return run_combined(model, run, ph.theta_hat, ph.mu_hat, opt.mode, rng);
}

}  // namespace varcvar
