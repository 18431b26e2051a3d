#include "varcvar/sa_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace varcvar {

void StepSchedule::validate() const {
  if (!(gamma1 > 0.0)) throw std::invalid_argument("step schedule: gamma1 must be > 0");
  if (!(exponent > 0.5 && exponent <= 1.0))
    throw std::invalid_argument("step schedule: exponent must lie in (0.5, 1]");
  if (!(offset >= 0.0)) throw std::invalid_argument("step schedule: offset must be >= 0");
}

double StepSchedule::operator()(std::size_t n) const {
  return gamma1 / (std::pow(static_cast<double>(n), exponent) + offset);
}

double step(std::size_t n, const StepSchedule& schedule) { return schedule(n); }

ConfidenceSchedule ConfidenceSchedule::constant(double target) {
  return ConfidenceSchedule{target, {{1, target}}};
}

ConfidenceSchedule ConfidenceSchedule::thirds(double target, std::size_t m_steps) {
  const std::size_t m1 = m_steps / 3;
  ConfidenceSchedule s{target, {}};
  // Targets below the warm-up levels skip them.
  s.breakpoints.emplace_back(1, std::min(0.5, target));
  s.breakpoints.emplace_back(m1 + 1, std::min(0.8, target));
  s.breakpoints.emplace_back(2 * m1 + 1, target);
  return s;
}

void ConfidenceSchedule::validate() const {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("alpha schedule: target must lie in (0, 1)");
  if (breakpoints.empty()) throw std::invalid_argument("alpha schedule: no breakpoints");
  double prev_level = 0.0;
  std::size_t prev_n = 0;
  for (const auto& [n, level] : breakpoints) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("alpha schedule: levels must lie in (0, 1)");
    if (level < prev_level) throw std::invalid_argument("alpha schedule: levels must be non-decreasing");
    if (n < prev_n) throw std::invalid_argument("alpha schedule: breakpoints must be sorted");
    prev_level = level;
    prev_n = n;
  }
  if (breakpoints.back().second != target)
    throw std::invalid_argument("alpha schedule: last level must equal the target");
}

double ConfidenceSchedule::at(std::size_t n) const {
  double level = breakpoints.empty() ? target : breakpoints.front().second;
  for (const auto& [first, lv] : breakpoints) {
    if (n >= first) level = lv;
    else break;
  }
  return level;
}

std::size_t ConfidenceSchedule::settled_from() const {
  std::size_t from = 1;
  for (auto it = breakpoints.rbegin(); it != breakpoints.rend(); ++it) {
    if (it->second != target) break;
    from = it->first;
  }
  return from;
}

double alpha_at(std::size_t n, const ConfidenceSchedule& schedule) { return schedule.at(n); }

namespace {
std::string abort_message(std::size_t iteration, const std::string& component) {
  std::ostringstream os;
  os << "non-finite " << component << " at iteration " << iteration;
  return os.str();
}
}  // namespace

NumericAbort::NumericAbort(std::size_t iteration, std::string component)
    : std::runtime_error(abort_message(iteration, component)),
      iteration_(iteration),
      component_(std::move(component)) {}

void require_finite(double v, std::size_t iteration, const char* component) {
  if (!std::isfinite(v)) throw NumericAbort(iteration, component);
}

void require_finite(std::span<const double> v, std::size_t iteration, const char* component) {
  for (double x : v) require_finite(x, iteration, component);
}

void rm_update(std::span<double> z, double gamma, std::span<const double> h_sample,
               std::span<const double> remainder, std::size_t iteration) {
  if (h_sample.size() != z.size() || (!remainder.empty() && remainder.size() != z.size()))
    throw std::invalid_argument("rm_update: dimension mismatch");
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] -= gamma * h_sample[i];
    if (!remainder.empty()) z[i] += gamma * remainder[i];
  }
  require_finite(std::span<const double>(z.data(), z.size()), iteration, "rm state");
}

double ExcessMoments::variance(double alpha) const {
  const double v = (m2 - m1 * m1) / ((1.0 - alpha) * (1.0 - alpha));
  return std::max(v, 0.0);
}

}  // namespace varcvar
