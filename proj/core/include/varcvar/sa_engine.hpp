#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace varcvar {

// gamma_n = gamma1 / (n^exponent + offset).
struct StepSchedule {
  double gamma1 = 1.0;
  double exponent = 0.75;
  double offset = 100.0;

  // Throws std::invalid_argument unless gamma1 > 0, exponent in (1/2, 1], offset >= 0.
  void validate() const;
  double operator()(std::size_t n) const;
};

double step(std::size_t n, const StepSchedule& schedule);

// Stepwise-constant level alpha_n: `breakpoints` holds (first iteration, level)
// pairs sorted by iteration; the level holds until the next breakpoint.
struct ConfidenceSchedule {
  double target = 0.95;
  std::vector<std::pair<std::size_t, double>> breakpoints;

  static ConfidenceSchedule constant(double target);
  // 50% on [1, M/3], 80% on (M/3, 2M/3], target afterwards.
  static ConfidenceSchedule thirds(double target, std::size_t m_steps);

  void validate() const;
  double at(std::size_t n) const;
  // First iteration from which alpha_n == target.
  std::size_t settled_from() const;
};

double alpha_at(std::size_t n, const ConfidenceSchedule& schedule);

// A non-finite iterate. Carries enough to locate the blow-up.
class NumericAbort : public std::runtime_error {
 public:
  NumericAbort(std::size_t iteration, std::string component);
  std::size_t iteration() const { return iteration_; }
  const std::string& component() const { return component_; }

 private:
  std::size_t iteration_;
  std::string component_;
};

void require_finite(double v, std::size_t iteration, const char* component);
void require_finite(std::span<const double> v, std::size_t iteration, const char* component);

// z <- z - gamma h + gamma r. An empty `remainder` means zero.
// Throws NumericAbort if the result is not finite.
void rm_update(std::span<double> z, double gamma, std::span<const double> h_sample,
               std::span<const double> remainder = {}, std::size_t iteration = 0);

// Running mean after adding `value` as the n-th element.
inline double cesaro_update(double bar, double value, std::size_t n) {
  return bar - (bar - value) / static_cast<double>(n);
}

// Full state of the coupled recursion.
struct RiskState {
  double xi = 0.0;
  double C = 0.0;
  std::vector<double> theta;
  std::vector<double> mu;
  std::size_t n = 0;
  double xi_bar = 0.0;  // mean of xi_0 .. xi_{n-1}
  double C_bar = 0.0;
  // Running moments of the (weighted) tail excess, for sigma_n.
  double m1 = 0.0;
  double m2 = 0.0;
};

// Running first/second moments of the tail excess (Psi(L) - xi)1{L >= xi} w.
struct ExcessMoments {
  std::size_t count = 0;
  double m1 = 0.0;
  double m2 = 0.0;

  void add(double excess) {
    ++count;
    m1 = cesaro_update(m1, excess, count);
    m2 = cesaro_update(m2, excess * excess, count);
  }
  // (m2 - m1^2) / (1 - alpha)^2, floored at 0.
  double variance(double alpha) const;
};

}  // namespace varcvar
