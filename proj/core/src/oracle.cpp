#include "varcvar/oracle.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "varcvar/distributions.hpp"
#include "varcvar/special_functions.hpp"

namespace varcvar {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

VarCvar analytic_put_var_cvar(const ShortPutModel& model, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const double z = inverse_normal_cdf(1.0 - alpha);
  auto loss = [&](double x) {
    const double v = x;
    return model.loss(std::span<const double>(&v, 1));
  };
  VarCvar out;
  out.var = loss(z);
  // Tail is x <= z; tail mean over a set of probability 1 - alpha.
  const double tail = quadrature([&](double x) { return loss(x) * normal_pdf(x); }, -kInf, z, 1e-11);
  out.cvar = tail / (1.0 - alpha);
  return out;
}

VarCvar analytic_put_var_cvar(const GbmSpec& spec, double alpha) {
  return analytic_put_var_cvar(ShortPutModel(spec), alpha);
}

double nig_cdf(double x, const NigParams& p) {
  // Split at the mode region so the integrand's peak is not skipped.
  auto f = [&](double t) { return nig_density(t, p); };
  if (x <= p.mu) return quadrature(f, -kInf, x, 1e-12);
  return 1.0 - quadrature(f, x, kInf, 1e-12);
}

double nig_quantile(double prob, const NigParams& p) {
  if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("nig_quantile: p must lie in (0, 1)");
  const double sd = std::sqrt(p.delta * p.alpha * p.alpha / std::pow(p.gamma(), 3));
  double lo = p.mu - sd, hi = p.mu + sd;
  while (nig_cdf(lo, p) > prob) lo -= 2.0 * sd;
  while (nig_cdf(hi, p) < prob) hi += 2.0 * sd;
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve([&](double x) { return nig_cdf(x, p) - prob; }, lo, hi,
                                             boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

VarCvar nig_call_var_cvar(const NigCallModel& model, double alpha) {
  const auto& p = model.spec().nig;
  const double q = nig_quantile(alpha, p);
  VarCvar out;
  out.var = model.loss_at(q);
  const double lk = std::log(model.spec().strike);
  // Below log K the loss is flat; split there so the kink is a node.
  const double fwd = model.loss_at(lk);  // = -e^{rT} C0
  const double n = model.spec().notional, k = model.spec().strike;
  auto f = [&](double x) {
    const double lp = nig_log_density(x, p);
    if (x <= lk) return fwd * std::exp(lp);
    return n * (std::exp(x + lp) - k * std::exp(lp)) + fwd * std::exp(lp);
  };
  double tail = 0.0;
  if (q < lk) {
    tail = quadrature(f, q, lk, 1e-10) + quadrature(f, lk, kInf, 1e-9);
  } else {
    tail = quadrature(f, q, kInf, 1e-9);
  }
  out.cvar = tail / (1.0 - alpha);
  return out;
}

double empirical_quantile(std::vector<double> samples, double alpha) {
  if (samples.empty()) throw std::invalid_argument("empirical_quantile: no samples");
  const std::size_t n = samples.size();
  auto rank = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::sort(samples.begin(), samples.end());
  return samples[rank - 1];
}

double empirical_cvar(std::vector<double> samples, double alpha) {
  const double q = empirical_quantile(samples, alpha);
  double sum = 0.0;
  std::size_t k = 0;
  for (double s : samples) {
    if (s >= q) {
      sum += s;
      ++k;
    }
  }
  return sum / static_cast<double>(k);
}

TailProblem tail_problem(const ShortPutModel& model, double xi) {
  const auto& s = model.spec();
  // loss(x) >= xi  <=>  S_T(x) <= K - (xi / q + fwd premium)
  const double fwd = std::exp(s.r * s.maturity) * model.premium();
  const double spot = s.strike - (xi / s.quantity + fwd);
  TailProblem t;
  t.xi = xi;
  t.loss = [&model](double x) { return model.loss(std::span<const double>(&x, 1)); };
  t.log_density = [](double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * 3.14159265358979323846); };
  t.lo = -kInf;
  if (spot <= 0.0) {
    t.hi = -kInf;  // empty
  } else if (xi <= -s.quantity * fwd) {
    t.hi = kInf;  // whole line
  } else {
    const double drift = (s.r - 0.5 * s.sigma * s.sigma) * s.maturity;
    t.hi = (std::log(spot / s.s0) - drift) / (s.sigma * std::sqrt(s.maturity));
  }
  return t;
}

TailProblem tail_problem(const NigCallModel& model, double xi) {
  const auto& s = model.spec();
  const double fwd = std::exp(s.r * s.maturity) * model.premium();
  TailProblem t;
  t.xi = xi;
  t.loss = [&model](double x) { return model.loss_at(x); };
  const NigParams p = s.nig;
  t.log_density = [p](double x) { return nig_log_density(x, p); };
  t.hi = kInf;
  t.lo = xi <= -fwd ? -kInf : std::log(s.strike + (xi + fwd) / s.notional);
  if (std::isfinite(t.lo)) {
    // notional e^x - c with c > 0 on the tail
    const double c = s.notional * s.strike + fwd + xi;
    const double log_n = std::log(s.notional);
    t.log_excess = [c, log_n, n = s.notional](double x) { return log_n + x + std::log1p(-c / n * std::exp(-x)); };
  }
  return t;
}

double q_value(const TailProblem& tail, QFunctional which, ShiftFamily family, double shift,
               const NigParams* nig) {
  if (!(tail.lo < tail.hi)) return 0.0;
  if (family == ShiftFamily::esscher && nig == nullptr)
    throw std::invalid_argument("q_value: Esscher family needs NIG parameters");
  const double xi = tail.xi;
  const double psi_t = family == ShiftFamily::esscher ? nig_cumulant(shift, *nig) : 0.0;
  auto f = [&](double x) {
    const double lp = tail.log_density(x);
    if (!std::isfinite(lp)) return 0.0;
    double log_v = family == ShiftFamily::translation ? 2.0 * lp - tail.log_density(x - shift)
                                                      : lp + psi_t - shift * x;
    if (which == QFunctional::q2) {
      if (tail.log_excess) {
        log_v += 2.0 * tail.log_excess(x);
      } else {
        const double e = std::abs(tail.loss(x) - xi);
        if (e == 0.0) return 0.0;
        log_v += 2.0 * std::log(e);
      }
    }
    return std::exp(log_v);
  };
  return quadrature(f, tail.lo, tail.hi, 1e-12);
}

QMinimum grid_minimize_q(const TailProblem& tail, QFunctional which, ShiftFamily family,
                         std::span<const double> grid, const NigParams* nig) {
  if (grid.empty()) throw std::invalid_argument("grid_minimize_q: empty grid");
  std::vector<double> vals(grid.size());
  // A shift where the second moment diverges shows up as a quadrature failure.
  auto safe = [&](double t) {
    try {
      return q_value(tail, which, family, t, nig);
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = safe(grid[i]);
  const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  QMinimum out{grid[best], vals[best]};
  if (!std::isfinite(out.value)) throw std::runtime_error("grid_minimize_q: no finite value on the grid");
  if (grid.size() < 3) return out;
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[best + 1 == grid.size() ? best : best + 1];
  auto obj = [&](double t) { return safe(t); };
  boost::uintmax_t iters = 200;
  // 1e-4 absolute on the minimizer: ask for ~ 20 bits on a unit-size bracket.
  const auto r = boost::math::tools::brent_find_minima(obj, lo, hi, 24, iters);
  if (r.second <= out.value) out = {r.first, r.second};
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace varcvar
