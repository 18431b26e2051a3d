#pragma once

// Reference values that do not go through any recursion. Nothing here may
// depend on the stochastic-approximation modules.

#include <functional>
#include <span>
#include <vector>

#include "varcvar/loss_models.hpp"
#include "varcvar/quadrature.hpp"

namespace varcvar {

struct VarCvar {
  double var = 0.0;
  double cvar = 0.0;
};

// Closed-form VaR (the put loss decreases in x) and tail mean by quadrature.
VarCvar analytic_put_var_cvar(const GbmSpec& spec, double alpha);
VarCvar analytic_put_var_cvar(const ShortPutModel& model, double alpha);

// NIG call: quantile of X by root-finding on the quadrature CDF.
VarCvar nig_call_var_cvar(const NigCallModel& model, double alpha);
double nig_cdf(double x, const NigParams& params);
double nig_quantile(double p, const NigParams& params);

// Order statistic of rank ceil(alpha N). Throws std::invalid_argument on empty input.
double empirical_quantile(std::vector<double> samples, double alpha);
// Mean of the samples at or above the empirical quantile.
double empirical_cvar(std::vector<double> samples, double alpha);

inline double quadrature(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-10) {
  return integrate(f, lo, hi, tol);
}

// A one-dimensional model seen through its tail set {phi >= xi} = [lo, hi].
struct TailProblem {
  std::function<double(double)> loss;
  std::function<double(double)> log_density;
  // log(loss - xi) on the tail, for losses that overflow before the density
  // underflows. Optional.
  std::function<double(double)> log_excess;
  double xi;
  double lo;
  double hi;
};

TailProblem tail_problem(const ShortPutModel& model, double xi);
TailProblem tail_problem(const NigCallModel& model, double xi);

enum class QFunctional { q1, q2 };
enum class ShiftFamily { translation, esscher };

// Second moment of the importance-sampling estimator of the tail indicator
// (q1) or the squared tail excess (q2) as a function of the shift.
// translation: E[f(X) p(X)/p(X - t)]; esscher (NIG only): E[f(X) e^{psi(t) - t X}].
double q_value(const TailProblem& tail, QFunctional which, ShiftFamily family, double shift,
               const NigParams* nig = nullptr);

struct QMinimum {
  double shift = 0.0;
  double value = 0.0;
};

// Scan the grid, then refine inside the best cell to 1e-4.
QMinimum grid_minimize_q(const TailProblem& tail, QFunctional which, ShiftFamily family,
                         std::span<const double> grid, const NigParams* nig = nullptr);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace varcvar
