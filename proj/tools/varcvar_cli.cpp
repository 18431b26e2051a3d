// varcvar run --config cfg.json [--seed S] [--workers W] [--output out.csv]
// varcvar oracle --model short_put --alpha 0.95
//
// exit: 0 ok, 2 configuration error, 3 numeric abort

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "varcvar/config.hpp"
#include "varcvar/driver.hpp"
#include "varcvar/loss_models.hpp"
#include "varcvar/oracle.hpp"
#include "varcvar/rng.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericAbort = 3;

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> workers,
            const std::string& output) {
  varcvar::RunConfig cfg = varcvar::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (workers) cfg.workers = *workers;
  if (!output.empty()) cfg.output = output;
  cfg.validate();
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';

  const varcvar::Table table = varcvar::run_table(cfg);
  if (cfg.output.empty()) {
    varcvar::write_csv(std::cout, table);
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw varcvar::ConfigError("output", "cannot write '" + cfg.output + "'");
    varcvar::write_csv(out, table);
  }
  return 0;
}

varcvar::ModelSpec default_spec(const std::string& id) {
  if (id == "short_put") return varcvar::GbmSpec{};
  if (id == "basket") return varcvar::BasketSpec{};
  if (id == "spark_spread") return varcvar::SparkSpreadSpec{};
  if (id == "nig_call") return varcvar::NigCallSpec{};
  throw varcvar::ConfigError("--model", "unknown model '" + id + "'");
}

int cmd_oracle(const std::string& id, double alpha, std::size_t samples, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw varcvar::ConfigError("--alpha", "must lie in (0, 1)");
  const auto spec = default_spec(id);
  const auto model = varcvar::make_model(spec);
  std::printf("model %s alpha %.6g\n", id.c_str(), alpha);

  if (const auto* put = dynamic_cast<const varcvar::ShortPutModel*>(model.get())) {
    const auto ref = varcvar::analytic_put_var_cvar(*put, alpha);
    std::printf("analytic   var %.6f cvar %.6f (premium %.6f)\n", ref.var, ref.cvar, put->premium());
  } else if (const auto* nig = dynamic_cast<const varcvar::NigCallModel*>(model.get())) {
    const auto ref = varcvar::nig_call_var_cvar(*nig, alpha);
    std::printf("quadrature var %.6f cvar %.6f (premium %.6f)\n", ref.var, ref.cvar, nig->premium());
  }

  varcvar::Rng rng(seed);
  std::vector<double> x(model->dim());
  std::vector<double> losses(samples);
  for (auto& l : losses) {
    model->distribution().sample(rng, x);
    l = model->loss(x);
  }
  const double q = varcvar::empirical_quantile(losses, alpha);
  const double c = varcvar::empirical_cvar(losses, alpha);
  std::printf("empirical  var %.6f cvar %.6f (%zu samples, seed %llu)\n", q, c, samples,
              static_cast<unsigned long long>(seed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VaR / CVaR by stochastic approximation with adaptive importance sampling"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  auto* run = app.add_subcommand("run", "run the estimation grid of a JSON configuration");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--seed", seed, "master seed (overrides the config)");
  run->add_option("--workers", workers, "worker threads (overrides the config)");
  run->add_option("--output", output, "CSV output path (default stdout)");

  std::string model_id;
  double alpha = 0.95;
  std::size_t samples = 1000000;
  std::uint64_t oracle_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "print reference VaR / CVaR for a model with default parameters");
  oracle->add_option("--model", model_id, "short_put, basket, spark_spread or nig_call")->required();
  oracle->add_option("--alpha", alpha, "confidence level")->required();
  oracle->add_option("--samples", samples, "sample size of the empirical reference");
  oracle->add_option("--seed", oracle_seed, "seed of the empirical reference");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, seed, workers, output);
    return cmd_oracle(model_id, alpha, samples, oracle_seed);
  } catch (const varcvar::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const varcvar::NumericAbort& e) {
    std::cerr << "numeric abort: " << e.what() << '\n';
    return kNumericAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
