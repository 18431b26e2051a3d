#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "varcvar/is_esscher.hpp"
#include "varcvar/is_translation.hpp"
#include "varcvar/loss_models.hpp"
#include "varcvar/sa_engine.hpp"

namespace varcvar {

enum class IsMode { none, translation, esscher };

std::string_view to_string(IsMode m);
std::string_view to_string(Phase2Mode m);

// Bad or inconsistent run configuration. `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct RunConfig {
  ModelSpec model = GbmSpec{};
  bool has_model = false;
  std::string psi = "identity";
  std::vector<double> alphas{0.95, 0.99, 0.995};
  std::vector<std::size_t> n_steps{10000, 100000, 500000};
  std::size_t phase1_steps = 15000;
  IsMode is_mode = IsMode::translation;
  Phase2Mode phase2_mode = Phase2Mode::adaptive;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string output;  // empty: stdout
  StepSchedule schedule{};
  std::size_t pilot_size = 1000;
  std::size_t burn_in = 0;
  CStart c_start = CStart::pilot;
  double ci_level = 0.95;
  bool record_wall_time = true;
  EsscherOptions esscher{};

  std::vector<std::string> warnings;  // unknown keys and the like

  // Throws ConfigError.
  void validate() const;
};

// Throws ConfigError on malformed JSON (with position) or invalid fields.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace varcvar
