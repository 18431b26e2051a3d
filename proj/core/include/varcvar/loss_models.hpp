#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "varcvar/distributions.hpp"

namespace varcvar {

// Transform applied to the loss inside the CVaR functional.
class Psi {
 public:
  enum class Kind { identity, square, custom };

  static Psi identity() { return Psi(Kind::identity, {}, "identity"); }
  static Psi square() { return Psi(Kind::square, {}, "square"); }
  static Psi custom(std::function<double(double)> fn, std::string name);
  // "identity" or "square"; throws std::invalid_argument otherwise.
  static Psi from_name(std::string_view name);

  double operator()(double v) const {
    switch (kind_) {
      case Kind::identity: return v;
      case Kind::square: return v * v;
      case Kind::custom: return fn_(v);
    }
    return v;
  }
  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

 private:
  Psi(Kind kind, std::function<double(double)> fn, std::string name)
      : kind_(kind), fn_(std::move(fn)), name_(std::move(name)) {}

  Kind kind_;
  std::function<double(double)> fn_;
  std::string name_;
};

// Constants attached to the majorant G with |phi(x)| <= G(x):
//   G(x + y) <= C (1 + G(x))^c (1 + G(y))^c.
// `l4_power` is the power of G(-mu) in the denominator of the CVaR reducer
// update; 1 gives 1 + G(-mu) + xi^2, 2c the fully general form.
struct GrowthBound {
  double c = 1.0;
  double C = 1.0;
  double l4_power = 1.0;
};

// A portfolio loss phi(X) over structural noise X. Immutable once built.
class LossModel {
 public:
  virtual ~LossModel() = default;

  virtual std::string_view id() const = 0;
  virtual const InputDistribution& distribution() const = 0;
  virtual double loss(std::span<const double> x) const = 0;
  // Majorant G(x) of |phi(x)|.
  virtual double growth(std::span<const double> x) const = 0;
  virtual GrowthBound growth_bound() const = 0;

  std::size_t dim() const { return distribution().dim(); }
  const Psi& psi() const { return psi_; }

 protected:
  explicit LossModel(Psi psi) : psi_(std::move(psi)) {}

 private:
  Psi psi_;
};

// --- Black-Scholes vanilla prices ------------------------------------------------

double bs_call_price(double s0, double strike, double r, double sigma, double maturity);
double bs_put_price(double s0, double strike, double r, double sigma, double maturity);

// Single asset under geometric Brownian motion with one vanilla position.
// A non-positive premium means "price it with Black-Scholes".
struct GbmSpec {
  double s0 = 100.0;
  double sigma = 0.2;
  double r = 0.05;
  double maturity = 1.0;
  double strike = 110.0;
  double quantity = 1.0;
  double premium = -1.0;

  void validate() const;
};

double bs_call_price(const GbmSpec& spec);
double bs_put_price(const GbmSpec& spec);

// Short put: phi(x) = q [(K - S_T)_+ - e^{rT} P0].
class ShortPutModel final : public LossModel {
 public:
  explicit ShortPutModel(GbmSpec spec = {}, Psi psi = Psi::identity());

  std::string_view id() const override { return "short_put"; }
  const InputDistribution& distribution() const override { return dist_; }
  double loss(std::span<const double> x) const override;
  double growth(std::span<const double> x) const override;
  GrowthBound growth_bound() const override { return {1.0, 1.0, 1.0}; }

  const GbmSpec& spec() const { return spec_; }
  double premium() const { return premium_; }
  double terminal_spot(double x) const;

 private:
  GbmSpec spec_;
  GaussianStd dist_{1};
  double premium_;
  double forward_premium_;
};

// Short strangles (calls and puts) on independent GBM assets with a common spec.
struct BasketSpec {
  std::size_t n_assets = 5;
  double s0 = 120.0;
  double sigma = 0.2;
  double r = 0.05;
  double maturity = 0.25;
  double call_strike = 130.0;
  double put_strike = 110.0;
  double calls_per_asset = 10.0;
  double puts_per_asset = 10.0;
  double call_premium = -1.0;  // <= 0: Black-Scholes
  double put_premium = -1.0;   // <= 0: Black-Scholes

  void validate() const;
};

class BasketStrangleModel final : public LossModel {
 public:
  explicit BasketStrangleModel(BasketSpec spec = {}, Psi psi = Psi::identity());

  std::string_view id() const override { return "basket"; }
  const InputDistribution& distribution() const override { return dist_; }
  double loss(std::span<const double> x) const override;
  double growth(std::span<const double> x) const override;
  GrowthBound growth_bound() const override { return {1.0, 1.0 / growth_scale_, 1.0}; }

  const BasketSpec& spec() const { return spec_; }
  double call_premium() const { return call_premium_; }
  double put_premium() const { return put_premium_; }
  double terminal_spot(double x) const;

 private:
  BasketSpec spec_;
  GaussianStd dist_;
  double call_premium_;
  double put_premium_;
  double forward_premium_;
  double drift_;
  double vol_;
  double growth_scale_;
};

// Gas-fired plant sold forward (daily spark spreads) hedged by daily calls on
// electricity. Log-prices are Ornstein-Uhlenbeck around their initial level.
struct SparkSpreadSpec {
  std::size_t days = 30;
  double day_count = 360.0;  // t_k = k / day_count
  double se0 = 40.0;
  double sg0 = 3.0;
  double heat_rate = 10.0;
  double generation_cost = 5.0;
  double call_strike = 60.0;
  double correlation = 0.4;
  double mean_reversion = 4.0;  // per year, both commodities
  double sigma_e = 0.8;
  double sigma_g = 0.4;
  double r = 0.05;
  double plant_premium = 149.9;  // whole strip of daily spread options
  double call_premium = 3.8;     // one daily call

  void validate() const;
};

class SparkSpreadModel final : public LossModel {
 public:
  explicit SparkSpreadModel(SparkSpreadSpec spec = {}, Psi psi = Psi::identity());

  std::string_view id() const override { return "spark_spread"; }
  const InputDistribution& distribution() const override { return dist_; }
  // x[0, days) drive electricity, x[days, 2 days) gas.
  double loss(std::span<const double> x) const override;
  double growth(std::span<const double> x) const override;
  GrowthBound growth_bound() const override { return {1.0, 1.0 / growth_scale_, 1.0}; }

  const SparkSpreadSpec& spec() const { return spec_; }

 private:
  SparkSpreadSpec spec_;
  GaussianStd dist_;
  double decay_;
  double step_sd_e_;
  double step_sd_g_;
  double horizon_;
  double growth_rate_;
  double growth_scale_;
};

// Call on e^{X_T} with X_T ~ NIG: phi(x) = notional (e^x - K)_+ - e^{rT} C0.
struct NigCallSpec {
  NigParams nig{};
  double strike = 0.6;
  double notional = 50.0;
  double r = 0.05;
  double maturity = 1.0;
  double premium = -1.0;  // <= 0: notional * E[(e^X - K)_+] by quadrature

  void validate() const;
};

class NigCallModel final : public LossModel {
 public:
  explicit NigCallModel(NigCallSpec spec = {}, Psi psi = Psi::identity());

  std::string_view id() const override { return "nig_call"; }
  const InputDistribution& distribution() const override { return dist_; }
  double loss(std::span<const double> x) const override;
  double growth(std::span<const double> x) const override;
  GrowthBound growth_bound() const override { return {1.0, 1.0, 1.0}; }

  const NigCallSpec& spec() const { return spec_; }
  const NigDistribution& nig() const { return dist_; }
  double premium() const { return premium_; }
  double loss_at(double x) const;

 private:
  NigCallSpec spec_;
  NigDistribution dist_;
  double premium_;
  double forward_premium_;
};

// notional * E[(e^X - K)_+] for X ~ NIG, by adaptive quadrature.
double nig_call_expected_payoff(const NigParams& params, double strike, double notional);

using ModelSpec = std::variant<GbmSpec, BasketSpec, SparkSpreadSpec, NigCallSpec>;

std::unique_ptr<LossModel> make_model(const ModelSpec& spec, Psi psi = Psi::identity());
std::string_view model_id(const ModelSpec& spec);

}  // namespace varcvar
