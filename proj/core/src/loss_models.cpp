#include "varcvar/loss_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "varcvar/quadrature.hpp"
#include "varcvar/special_functions.hpp"

namespace varcvar {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double bs_d1(double s0, double strike, double r, double sigma, double t) {
  return (std::log(s0 / strike) + (r + 0.5 * sigma * sigma) * t) / (sigma * std::sqrt(t));
}

double sum_abs(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

}  // namespace

Psi Psi::custom(std::function<double(double)> fn, std::string name) {
  if (!fn) throw std::invalid_argument("Psi::custom needs a callable");
  return Psi(Kind::custom, std::move(fn), std::move(name));
}

Psi Psi::from_name(std::string_view name) {
  if (name == "identity") return identity();
  if (name == "square") return square();
  throw std::invalid_argument("unknown psi transform '" + std::string(name) + "'");
}

// --- Black-Scholes -------------------------------------------------------------

double bs_call_price(double s0, double strike, double r, double sigma, double t) {
  const double disc = strike * std::exp(-r * t);
  if (sigma <= 0.0 || t <= 0.0) return std::max(s0 - disc, 0.0);
  const double d1 = bs_d1(s0, strike, r, sigma, t);
  const double d2 = d1 - sigma * std::sqrt(t);
  return s0 * normal_cdf(d1) - disc * normal_cdf(d2);
}

double bs_put_price(double s0, double strike, double r, double sigma, double t) {
  const double disc = strike * std::exp(-r * t);
  if (sigma <= 0.0 || t <= 0.0) return std::max(disc - s0, 0.0);
  const double d1 = bs_d1(s0, strike, r, sigma, t);
  const double d2 = d1 - sigma * std::sqrt(t);
  return disc * normal_cdf(-d2) - s0 * normal_cdf(-d1);
}

double bs_call_price(const GbmSpec& s) { return bs_call_price(s.s0, s.strike, s.r, s.sigma, s.maturity); }
double bs_put_price(const GbmSpec& s) { return bs_put_price(s.s0, s.strike, s.r, s.sigma, s.maturity); }

// --- Example portfolios --------------------------------------------------------

void GbmSpec::validate() const {
  require(s0 > 0.0, "gbm: s0 must be positive");
  require(sigma > 0.0, "gbm: sigma must be positive");
  require(maturity > 0.0, "gbm: maturity must be positive");
  require(strike > 0.0, "gbm: strike must be positive");
  require(std::isfinite(r), "gbm: r must be finite");
  require(quantity > 0.0, "gbm: quantity must be positive");
}

ShortPutModel::ShortPutModel(GbmSpec spec, Psi psi) : LossModel(std::move(psi)), spec_(spec) {
  spec_.validate();
  premium_ = spec_.premium > 0.0 ? spec_.premium : bs_put_price(spec_);
  forward_premium_ = std::exp(spec_.r * spec_.maturity) * premium_;
}

double ShortPutModel::terminal_spot(double x) const {
  const auto& s = spec_;
  return s.s0 * std::exp((s.r - 0.5 * s.sigma * s.sigma) * s.maturity + s.sigma * std::sqrt(s.maturity) * x);
}

double ShortPutModel::loss(std::span<const double> x) const {
  return spec_.quantity * (std::max(spec_.strike - terminal_spot(x[0]), 0.0) - forward_premium_);
}

double ShortPutModel::growth(std::span<const double>) const {
  return spec_.quantity * (spec_.strike + forward_premium_);
}

void BasketSpec::validate() const {
  require(n_assets >= 1, "basket: n_assets must be >= 1");
  require(s0 > 0.0 && sigma > 0.0 && maturity > 0.0, "basket: s0, sigma, maturity must be positive");
  require(call_strike > 0.0 && put_strike > 0.0, "basket: strikes must be positive");
  require(calls_per_asset >= 0.0 && puts_per_asset >= 0.0, "basket: quantities must be >= 0");
}

BasketStrangleModel::BasketStrangleModel(BasketSpec spec, Psi psi)
    : LossModel(std::move(psi)), spec_(spec), dist_(spec.n_assets) {
  spec_.validate();
  const auto& s = spec_;
  call_premium_ = s.call_premium > 0.0 ? s.call_premium
                                       : bs_call_price(s.s0, s.call_strike, s.r, s.sigma, s.maturity);
  put_premium_ = s.put_premium > 0.0 ? s.put_premium
                                     : bs_put_price(s.s0, s.put_strike, s.r, s.sigma, s.maturity);
  const double n = static_cast<double>(s.n_assets);
  forward_premium_ = std::exp(s.r * s.maturity) * n *
                     (s.calls_per_asset * call_premium_ + s.puts_per_asset * put_premium_);
  drift_ = (s.r - 0.5 * s.sigma * s.sigma) * s.maturity;
  vol_ = s.sigma * std::sqrt(s.maturity);
  // Each leg is below qc S + qp Kp, and S_i <= s0 e^{|drift|} e^{vol sum|x|}.
  growth_scale_ = n * (s.calls_per_asset * s.s0 * std::exp(std::abs(drift_)) + s.puts_per_asset * s.put_strike) +
                  forward_premium_;
}

double BasketStrangleModel::terminal_spot(double x) const { return spec_.s0 * std::exp(drift_ + vol_ * x); }

double BasketStrangleModel::loss(std::span<const double> x) const {
  double payoff = 0.0;
  for (double xi : x) {
    const double st = terminal_spot(xi);
    payoff += spec_.calls_per_asset * std::max(st - spec_.call_strike, 0.0) +
              spec_.puts_per_asset * std::max(spec_.put_strike - st, 0.0);
  }
  return payoff - forward_premium_;
}

double BasketStrangleModel::growth(std::span<const double> x) const {
  return growth_scale_ * std::exp(std::min(vol_ * sum_abs(x), kMaxLogWeight));
}

void SparkSpreadSpec::validate() const {
  require(days >= 1, "spark_spread: days must be >= 1");
  require(day_count > 0.0, "spark_spread: day_count must be positive");
  require(se0 > 0.0 && sg0 > 0.0, "spark_spread: initial prices must be positive");
  require(correlation > -1.0 && correlation < 1.0, "spark_spread: correlation must be in (-1, 1)");
  require(mean_reversion > 0.0, "spark_spread: mean_reversion must be positive");
  require(sigma_e > 0.0 && sigma_g > 0.0, "spark_spread: volatilities must be positive");
  require(plant_premium >= 0.0 && call_premium >= 0.0, "spark_spread: premiums must be >= 0");
}

SparkSpreadModel::SparkSpreadModel(SparkSpreadSpec spec, Psi psi)
    : LossModel(std::move(psi)), spec_(spec), dist_(2 * spec.days) {
  spec_.validate();
  const auto& s = spec_;
  const double dt = 1.0 / s.day_count;
  decay_ = std::exp(-s.mean_reversion * dt);
  const double step_var = (1.0 - decay_ * decay_) / (2.0 * s.mean_reversion);
  step_sd_e_ = s.sigma_e * std::sqrt(step_var);
  step_sd_g_ = s.sigma_g * std::sqrt(step_var);
  horizon_ = static_cast<double>(s.days) * dt;
  // Log deviations are bounded by sd * sum|x| (gas shock mixes both halves).
  growth_rate_ = std::max(step_sd_e_, step_sd_g_);
  const double n = static_cast<double>(s.days);
  growth_scale_ = std::exp(s.r * horizon_) *
                  (n * (2.0 * s.se0 + s.heat_rate * s.sg0 + s.generation_cost + s.call_strike + s.call_premium) +
                   s.plant_premium);
}

double SparkSpreadModel::loss(std::span<const double> x) const {
  const auto& s = spec_;
  const std::size_t n = s.days;
  const double dt = 1.0 / s.day_count;
  const double mix = std::sqrt(1.0 - s.correlation * s.correlation);
  double dev_e = 0.0;  // log S^e - log S^e_0
  double dev_g = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double ze = x[k];
    const double zg = s.correlation * ze + mix * x[n + k];
    dev_e = decay_ * dev_e + step_sd_e_ * ze;
    dev_g = decay_ * dev_g + step_sd_g_ * zg;
    const double se = s.se0 * std::exp(dev_e);
    const double sg = s.sg0 * std::exp(dev_g);
    const double carry = std::exp(s.r * (horizon_ - static_cast<double>(k + 1) * dt));
    total += carry * (std::max(se - s.heat_rate * sg - s.generation_cost, 0.0) - std::max(se - s.call_strike, 0.0));
  }
  const double fwd = std::exp(s.r * horizon_);
  return total - fwd * s.plant_premium + static_cast<double>(n) * fwd * s.call_premium;
}

double SparkSpreadModel::growth(std::span<const double> x) const {
  return growth_scale_ * std::exp(std::min(growth_rate_ * sum_abs(x), kMaxLogWeight));
}

void NigCallSpec::validate() const {
  nig.validate();
  require(strike > 0.0, "nig_call: strike must be positive");
  require(notional > 0.0, "nig_call: notional must be positive");
  require(maturity > 0.0, "nig_call: maturity must be positive");
  // E[e^X] needs beta + 1 < alpha.
  require(nig.beta + 1.0 < nig.alpha, "nig_call: need beta + 1 < alpha for a finite price");
}

double nig_call_expected_payoff(const NigParams& params, double strike, double notional) {
  const double lk = std::log(strike);
  // e^{x + log p} keeps the far tail finite.
  const auto f = [&](double x) {
    const double lp = nig_log_density(x, params);
    return std::exp(x + lp) - strike * std::exp(lp);
  };
  return notional * integrate(f, lk, std::numeric_limits<double>::infinity(), 1e-9);
}

NigCallModel::NigCallModel(NigCallSpec spec, Psi psi)
    : LossModel(std::move(psi)), spec_(spec), dist_(spec.nig) {
  spec_.validate();
  premium_ = spec_.premium > 0.0 ? spec_.premium
                                 : nig_call_expected_payoff(spec_.nig, spec_.strike, spec_.notional);
  forward_premium_ = std::exp(spec_.r * spec_.maturity) * premium_;
}

double NigCallModel::loss_at(double x) const {
  return spec_.notional * std::max(std::exp(x) - spec_.strike, 0.0) - forward_premium_;
}

double NigCallModel::loss(std::span<const double> x) const { return loss_at(x[0]); }

double NigCallModel::growth(std::span<const double> x) const {
  return spec_.notional * std::exp(std::min(x[0], kMaxLogWeight)) + forward_premium_;
}

// --- factory -------------------------------------------------------------------

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::unique_ptr<LossModel> make_model(const ModelSpec& spec, Psi psi) {
  return std::visit(
      overloaded{
          [&](const GbmSpec& s) -> std::unique_ptr<LossModel> { return std::make_unique<ShortPutModel>(s, psi); },
          [&](const BasketSpec& s) -> std::unique_ptr<LossModel> {
            return std::make_unique<BasketStrangleModel>(s, psi);
          },
          [&](const SparkSpreadSpec& s) -> std::unique_ptr<LossModel> {
            return std::make_unique<SparkSpreadModel>(s, psi);
          },
          [&](const NigCallSpec& s) -> std::unique_ptr<LossModel> { return std::make_unique<NigCallModel>(s, psi); },
      },
      spec);
}

std::string_view model_id(const ModelSpec& spec) {
  return std::visit(overloaded{
                        [](const GbmSpec&) { return std::string_view("short_put"); },
                        [](const BasketSpec&) { return std::string_view("basket"); },
                        [](const SparkSpreadSpec&) { return std::string_view("spark_spread"); },
                        [](const NigCallSpec&) { return std::string_view("nig_call"); },
                    },
                    spec);
}

}  // namespace varcvar
