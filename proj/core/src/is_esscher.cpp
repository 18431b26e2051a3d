#include "varcvar/is_esscher.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "varcvar/naive_estimator.hpp"

namespace varcvar {

namespace {

void require_tilt(const NigParams& p, double t, const char* who) {
  if (!esscher_domain(p).contains(t) || !esscher_domain(p).contains(-t))
    throw std::domain_error(std::string(who) + ": tilt outside the admissible domain");
}

// e^{psi(t) - t x}
double esscher_weight(const NigParams& p, double t, double x) { return clamped_exp(nig_cumulant(t, p) - t * x); }

struct Tilter {
  const NigCallModel& model;
  const EsscherOptions& es;
  EsscherDomain dom;
  std::size_t clamps = 0;

  double clamp(double t) {
    bool moved = false;
    const double out = dom.clamp(t, es.domain_margin, &moved);
    if (moved) ++clamps;
    return out;
  }
};

// Noise for the four tilts of one iteration.
struct DrawSet {
  NigNoise v, c, t3, t4;
};

DrawSet draw(Rng& rng, DrawCoupling coupling) {
  DrawSet s;
  s.v = draw_nig_noise(rng);
  if (coupling == DrawCoupling::common) {
    s.c = s.t3 = s.t4 = s.v;
  } else {
    s.c = draw_nig_noise(rng);
    s.t3 = draw_nig_noise(rng);
    s.t4 = draw_nig_noise(rng);
  }
  return s;
}

}  // namespace

EsscherDomain symmetric_domain(const NigParams& p) {
  const double h = p.alpha - std::abs(p.beta);
  return {-h, h};
}

double l1_es(const NigCallModel& model, double xi, double theta, double x_tilted, double alpha) {
  const auto& p = model.spec().nig;
  require_tilt(p, theta, "l1_es");
  const double damp = std::exp(-0.5 * (nig_cumulant(theta, p) + nig_cumulant(-theta, p)));
  const bool hit = model.loss_at(x_tilted) >= xi;
  return damp * (1.0 - (hit ? esscher_weight(p, theta, x_tilted) : 0.0) / (1.0 - alpha));
}

double l2_es(const NigCallModel& model, double xi, double C, double mu, double x_tilted, double alpha) {
  const auto& p = model.spec().nig;
  require_tilt(p, mu, "l2_es");
  const Psi& psi = model.psi();
  const double loss = model.loss_at(x_tilted);
  const bool hit = loss >= xi;
  const double w = hit ? esscher_weight(p, mu, x_tilted) : 0.0;
  return C - cvar_target(psi(xi), psi(loss), hit, w, alpha);
}

double l3_es(const NigCallModel& model, double xi, double theta, double x_neg) {
  const auto& p = model.spec().nig;
  require_tilt(p, theta, "l3_es");
  if (model.loss_at(x_neg) < xi) return 0.0;
  return nig_cumulant_grad(theta, p) - x_neg;
}

double l4_es(const NigCallModel& model, double xi, double mu, double x_neg, double lambda) {
  const auto& p = model.spec().nig;
  require_tilt(p, mu, "l4_es");
  const double loss = model.loss_at(x_neg);
  if (loss < xi) return 0.0;
  const double ex = model.psi()(loss) - xi;
  const double damp = std::exp(-0.5 * lambda * std::abs(nig_cumulant_grad(-mu, p))) / (1.0 + xi * xi);
  return damp * ex * ex * (nig_cumulant_grad(mu, p) - x_neg);
}

PilotStart esscher_pilot_start(const NigCallModel& model, double alpha, double theta, std::size_t size, Rng& rng) {
  if (size == 0) throw std::invalid_argument("esscher_pilot_start: empty pilot");
  const auto& p = model.spec().nig;
  std::vector<std::pair<double, double>> lw(size);
  for (auto& e : lw) {
    const double x = sample_nig(p, theta, rng);
    e = {model.loss_at(x), esscher_weight(p, theta, x)};
  }
  return pilot_from_sample(std::move(lw), alpha, model.psi());
}

double esscher_pilot_quantile(const NigCallModel& model, double alpha, double theta, std::size_t size, Rng& rng) {
  return esscher_pilot_start(model, alpha, theta, size, rng).xi;
}

EsscherPhase1Result run_phase1_esscher(const NigCallModel& model, const Phase1Options& opt,
                                       const EsscherOptions& es, Rng& rng) {
  opt.schedule.validate();
  opt.alpha_schedule.validate();
  const auto& p = model.spec().nig;
  const double alpha = opt.alpha_schedule.target;
  Tilter tilt{model, es, symmetric_domain(p)};

  EsscherPhase1Result res;
  res.theta_hat = tilt.clamp(opt.theta0.empty() ? 0.0 : opt.theta0.at(0));
  res.mu_hat = tilt.clamp(opt.mu0.empty() ? 0.0 : opt.mu0.at(0));
  double xi = opt.xi0 ? *opt.xi0 : pilot_quantile(model, opt.alpha_schedule.at(1), opt.pilot_size, rng);

  for (std::size_t n = 1; n <= opt.m_steps; ++n) {
    const DrawSet ds = draw(rng, es.coupling);
    const double x = nig_from_noise(ds.v, p, 0.0);
    const double a_n = opt.alpha_schedule.at(n);
    if (opt.restart_at_breakpoints && n > 1 && a_n != opt.alpha_schedule.at(n - 1))
      xi = esscher_pilot_quantile(model, a_n, res.theta_hat, opt.pilot_size, rng);
    const double g = opt.schedule(n);
    const double loss = model.loss_at(x);
    const double h_hat = h1(xi, loss, a_n);
    if (a_n != alpha) {
      const double r = h_hat - h1(xi, loss, alpha);
      const double bound = std::abs(a_n - alpha) / ((1.0 - alpha) * (1.0 - alpha));
      res.remainder_ratio = std::max(res.remainder_ratio, std::abs(r) / bound);
    }
    if (opt.update_theta) {
      const double xn = nig_from_noise(ds.t3, p, -res.theta_hat);
      res.theta_hat = tilt.clamp(res.theta_hat - g * l3_es(model, xi, res.theta_hat, xn));
      require_finite(res.theta_hat, n, "theta_hat");
    }
    if (opt.update_mu) {
      const double xn = nig_from_noise(ds.t4, p, -res.mu_hat);
      res.mu_hat = tilt.clamp(res.mu_hat - g * l4_es(model, xi, res.mu_hat, xn, es.lambda));
      require_finite(res.mu_hat, n, "mu_hat");
    }
    xi -= g * h_hat;
    require_finite(xi, n, "xi_hat");
  }
  res.xi_hat = xi;
  res.clamp_events = tilt.clamps;
  return res;
}

ISReport run_combined_esscher(const NigCallModel& model, const RunOptions& opt, double theta0, double mu0,
                              Phase2Mode mode, const EsscherOptions& es, Rng& rng) {
  opt.schedule.validate();
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0))
    throw std::invalid_argument("run_combined_esscher: alpha must lie in (0, 1)");
  if (opt.n_steps == 0) throw std::invalid_argument("run_combined_esscher: n_steps must be >= 1");
  if (opt.burn_in >= opt.n_steps) throw std::invalid_argument("run_combined_esscher: burn_in must be < n_steps");
  const auto& p = model.spec().nig;
  Tilter tilt{model, es, symmetric_domain(p)};

  ISReport rep;
  RiskState& s = rep.state;
  double theta = tilt.clamp(theta0);
  double mu = tilt.clamp(mu0);
  const PilotStart start = initial_point(model, opt, rng);
  s.xi = start.xi;
  s.C = start.c;
  rep.xi0 = s.xi;
  if (opt.keep_trace) rep.xi_trace.reserve(opt.n_steps);

  const Psi& psi = model.psi();
  const double alpha = opt.alpha;
  const bool adaptive = mode == Phase2Mode::adaptive;
  ExcessMoments moments;
  std::size_t averaged = 0;

  for (std::size_t n = 1; n <= opt.n_steps; ++n) {
    if (opt.keep_trace) rep.xi_trace.push_back(s.xi);
    if (n > opt.burn_in) {
      ++averaged;
      s.xi_bar = cesaro_update(s.xi_bar, s.xi, averaged);
      s.C_bar = cesaro_update(s.C_bar, s.C, averaged);
    }
    const DrawSet ds = draw(rng, es.coupling);
    const double g = opt.schedule(n);

    const double xv = nig_from_noise(ds.v, p, theta);
    const double lv = model.loss_at(xv);
    const bool hit_v = lv >= s.xi;
    if (hit_v) ++rep.n_tail_hits;
    const double damp = std::exp(-0.5 * (nig_cumulant(theta, p) + nig_cumulant(-theta, p)));
    const double d_xi = damp * (1.0 - (hit_v ? esscher_weight(p, theta, xv) : 0.0) / (1.0 - alpha));

    const double xc = nig_from_noise(ds.c, p, mu);
    const double lc = model.loss_at(xc);
    const bool hit_c = lc >= s.xi;
    const double wc = hit_c ? esscher_weight(p, mu, xc) : 0.0;
    const double psi_c = psi(lc);
    const double psi_xi = psi(s.xi);
    moments.add(hit_c ? (psi_c - psi_xi) * wc : 0.0);
    const double d_c = s.C - cvar_target(psi_xi, psi_c, hit_c, wc, alpha);

    if (adaptive) {
      const double x3 = nig_from_noise(ds.t3, p, -theta);
      const double x4 = nig_from_noise(ds.t4, p, -mu);
      const double d3 = l3_es(model, s.xi, theta, x3);
      const double d4 = l4_es(model, s.xi, mu, x4, es.lambda);
      theta = tilt.clamp(theta - g * d3);
      mu = tilt.clamp(mu - g * d4);
      require_finite(theta, n, "theta");
      require_finite(mu, n, "mu");
    }
    s.xi -= g * d_xi;
    s.C -= g * d_c;
    require_finite(s.xi, n, "xi");
    require_finite(s.C, n, "C");
  }
  s.n = opt.n_steps;
  s.m1 = moments.m1;
  s.m2 = moments.m2;
  s.theta = {theta};
  s.mu = {mu};

  rep.n_steps = opt.n_steps;
  rep.var_hat = s.xi_bar;
  rep.cvar_hat = s.C_bar;
  rep.sigma_n = std::sqrt(moments.variance(alpha));
  rep.theta = s.theta;
  rep.mu = s.mu;
  rep.clamp_events = tilt.clamps;
  fill_interval(rep, opt.ci_level);
  return rep;
}

ISReport run_esscher(const NigCallModel& model, const TwoPhaseOptions& opt, const EsscherOptions& es, Rng& rng) {
  Phase1Options p1;
  p1.m_steps = opt.phase1_steps;
  p1.alpha_schedule = ConfidenceSchedule::thirds(opt.run.alpha, opt.phase1_steps);
  p1.schedule = opt.run.schedule;
  p1.pilot_size = opt.run.pilot_size;
  p1.restart_at_breakpoints = opt.restart_at_breakpoints;
  const auto ph = run_phase1_esscher(model, p1, es, rng);

  RunOptions run = opt.run;
  if (opt.start == Phase2Start::phase1_xi) {
    run.xi0 = ph.xi_hat;
  } else if (!run.xi0) {
    const PilotStart p = esscher_pilot_start(model, run.alpha, ph.theta_hat, run.pilot_size, rng);
    run.xi0 = p.xi;
    if (!run.c0 && run.c_start == CStart::pilot) run.c0 = p.c;
  }
  ISReport rep = run_combined_esscher(model, run, ph.theta_hat, ph.mu_hat, opt.mode, es, rng);
  rep.clamp_events += ph.clamp_events;
  return rep;
}

}  // namespace varcvar
