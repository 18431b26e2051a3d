#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "reference.hpp"
#include "varcvar/naive_estimator.hpp"

using namespace varcvar;

namespace {

using ref::short_put_truth;

double constant_loss(double) { return 5.0; }

}  // namespace

TEST(PilotFromSample, UnitWeightsRankCeil) {
  std::vector<std::pair<double, double>> lw;
  for (int i = 1; i <= 1000; ++i) lw.emplace_back(double(i), 1.0);
  const auto p = pilot_from_sample(lw, 0.95, Psi::identity());
  EXPECT_EQ(p.xi, 950.0);
  EXPECT_NEAR(p.c, 950.0 + 25.5, 1e-12);
  lw.pop_back();  // n = 999: ceil(949.05) = 950
  EXPECT_EQ(pilot_from_sample(lw, 0.95, Psi::identity()).xi, 950.0);
}

TEST(PilotFromSample, Weighted) {
  const std::vector<std::pair<double, double>> lw{{1, 0.5}, {2, 0.5}, {3, 1.5}, {4, 1.5}};
  const auto p = pilot_from_sample(lw, 0.5, Psi::identity());
  EXPECT_EQ(p.xi, 3.0);
  EXPECT_NEAR(p.c, 3.0 + 1.0 * 1.5 / (4 * 0.5), 1e-12);
  EXPECT_THROW(pilot_from_sample({}, 0.5, Psi::identity()), std::invalid_argument);
}

TEST(PilotFromSample, PsiAppliedToTail) {
  std::vector<std::pair<double, double>> lw;
  for (int i = 1; i <= 10; ++i) lw.emplace_back(double(i), 1.0);
  const auto p = pilot_from_sample(lw, 0.8, Psi::from_name("square"));
  EXPECT_EQ(p.xi, 8.0);
  EXPECT_NEAR(p.c, 64.0 + ((81 - 64) + (100 - 64)) / 2.0, 1e-12);
}

TEST(UpdateFunctions, Values) {
  EXPECT_NEAR(h1(1.0, 1.0, 0.95), 1.0 - 20.0, 1e-12);  // ties count as hits
  EXPECT_DOUBLE_EQ(h1(1.0, 0.5, 0.95), 1.0);
  EXPECT_DOUBLE_EQ(cvar_target(2.0, 4.0, true, 0.5, 0.9), 2.0 + 2.0 * 0.5 / 0.1);
  EXPECT_DOUBLE_EQ(cvar_target(2.0, 4.0, false, 0.5, 0.9), 2.0);
  EXPECT_DOUBLE_EQ(h2(2.0, 30.0, 4.0, 0.9, Psi::identity()), 30.0 - 22.0);
  EXPECT_DOUBLE_EQ(w_alt(2.0, 4.0, 0.9, Psi::identity()), 40.0);
  EXPECT_DOUBLE_EQ(w_alt(5.0, 4.0, 0.9, Psi::identity()), 0.0);
}

TEST(UpdateFunctions, MeanZeroAtTheRoot) {
  ShortPutModel m;
  const auto t = short_put_truth(m, 0.95);
  Rng rng(21);
  std::vector<double> a, b, c;
  std::vector<double> x(1);
  for (int i = 0; i < 1000000; ++i) {
    m.distribution().sample(rng, x);
    a.push_back(h1(m, t.var, x, 0.95));
    b.push_back(h2(m, t.var, t.cvar, x, 0.95));
    c.push_back(w_alt(t.var, m.loss(x), 0.95, m.psi()) - t.cvar);
  }
  EXPECT_LT(std::abs(ref::mean(a)), 4 * ref::std_error(a));
  EXPECT_LT(std::abs(ref::mean(b)), 4 * ref::std_error(b));
  EXPECT_LT(std::abs(ref::mean(c)), 4 * ref::std_error(c));
}

TEST(ShortPutTruth, KnownValues) {
  ShortPutModel m;
  const auto t95 = short_put_truth(m, 0.95), t99 = short_put_truth(m, 0.99);
  EXPECT_NEAR(t95.var, 24.6, 0.05);
  EXPECT_NEAR(t95.cvar, 30.3829, 1e-3);
  EXPECT_NEAR(t99.var, 34.0683, 1e-3);
  EXPECT_NEAR(t99.cvar, 38.1951, 1e-3);
}

TEST(RunNaive, ShortPutConverges) {
  ShortPutModel m;
  RunOptions o;
  o.n_steps = 1000000;
  for (double alpha : {0.95, 0.99}) {
    o.alpha = alpha;
    Rng rng(22);
    const auto rep = run_naive(m, o, rng);
    const auto t = short_put_truth(m, alpha);
    EXPECT_NEAR(rep.var_hat, t.var, 0.3) << alpha;
    EXPECT_NEAR(rep.cvar_hat, t.cvar, 5 * rep.sigma_n / std::sqrt(double(o.n_steps))) << alpha;
    EXPECT_GT(rep.n_tail_hits, std::size_t((1 - alpha) * o.n_steps * 0.9));
  }
}

TEST(RunNaive, IntervalCoverage) {
  ShortPutModel m;
  const auto t = short_put_truth(m, 0.95);
  RunOptions o;
  o.n_steps = 50000;
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Rng rng = Rng::stream(23, r);
    const auto rep = run_naive(m, o, rng);
    covered += (rep.ci_low <= t.cvar && t.cvar <= rep.ci_high);
  }
  // nominal 95%; binomial sd at R = 200 is about 1.5%
  EXPECT_GE(covered, int(0.90 * reps));
  EXPECT_LE(covered, int(0.99 * reps));
}

TEST(RunNaive, ConstantLoss) {
  ref::GaussianMapModel m(&constant_loss, 6.0, "constant");
  RunOptions o;
  o.n_steps = 200000;
  o.xi0 = 0.0;
  Rng rng(24);
  const auto rep = run_naive(m, o, rng);
  // xi chatters around 5 on the scale gamma_n / (1 - alpha)
  const double chatter = o.schedule(o.n_steps) / (1 - o.alpha);
  EXPECT_NEAR(rep.state.xi, 5.0, 2 * chatter);
  EXPECT_NEAR(rep.var_hat, 5.0, 0.05);
  EXPECT_NEAR(rep.cvar_hat, 5.0, 0.05);
}

TEST(RunNaive, TraceAndBurnIn) {
  ShortPutModel m;
  RunOptions o;
  o.n_steps = 5000;
  o.burn_in = 1000;
  o.keep_trace = true;
  Rng rng(25);
  const auto rep = run_naive(m, o, rng);
  ASSERT_EQ(rep.xi_trace.size(), 5000u);
  EXPECT_EQ(rep.xi_trace.front(), rep.xi0);
  const double tail_mean =
      std::accumulate(rep.xi_trace.begin() + 1000, rep.xi_trace.end(), 0.0) / 4000.0;
  EXPECT_NEAR(rep.var_hat, tail_mean, 1e-9);
}

TEST(RunNaive, Deterministic) {
  ShortPutModel m;
  RunOptions o;
  o.n_steps = 20000;
  Rng a(26), b(26);
  const auto ra = run_naive(m, o, a), rb = run_naive(m, o, b);
  EXPECT_EQ(ra.var_hat, rb.var_hat);
  EXPECT_EQ(ra.cvar_hat, rb.cvar_hat);
  EXPECT_EQ(ra.sigma_n, rb.sigma_n);
}

TEST(RunNaive, Validation) {
  ShortPutModel m;
  Rng rng(27);
  RunOptions o;
  o.alpha = 1.0;
  EXPECT_THROW(run_naive(m, o, rng), std::invalid_argument);
  o = {};
  o.n_steps = 0;
  EXPECT_THROW(run_naive(m, o, rng), std::invalid_argument);
  o = {};
  o.n_steps = 10;
  o.burn_in = 10;
  EXPECT_THROW(run_naive(m, o, rng), std::invalid_argument);
  o = {};
  o.schedule.exponent = 0.4;
  EXPECT_THROW(run_naive(m, o, rng), std::invalid_argument);
}

TEST(RunNaive, OverflowIsNumericAbort) {
  ShortPutModel m;
  RunOptions o;
  o.n_steps = 100;
  o.schedule.gamma1 = 1e308;
  Rng rng(28);
  EXPECT_THROW(run_naive(m, o, rng), NumericAbort);
}

TEST(InitialPoint, ExplicitValuesWin) {
  ShortPutModel m;
  RunOptions o;
  o.xi0 = 1.0;
  o.c0 = 2.0;
  Rng rng(29);
  auto p = initial_point(m, o, rng);
  EXPECT_EQ(p.xi, 1.0);
  EXPECT_EQ(p.c, 2.0);
  o.c0.reset();
  o.c_start = CStart::zero;
  p = initial_point(m, o, rng);
  EXPECT_EQ(p.c, 0.0);
  o.c_start = CStart::pilot;
  o.pilot_size = 100000;
  p = initial_point(m, o, rng);
  EXPECT_EQ(p.xi, 1.0);
  EXPECT_NEAR(p.c, short_put_truth(m, 0.95).cvar, 1.0);
}

TEST(SigmaN, MatchesDirectFormula) {
  const std::vector<double> xi{1, 1, 1, 1}, psi_loss{0, 2, 3, 5};
  // excesses 0, 1, 2, 4: mean 1.75, second moment 5.25
  const double want = std::sqrt((5.25 - 1.75 * 1.75) / (0.5 * 0.5));
  EXPECT_NEAR(sigma_n_estimate(xi, psi_loss, 0.5), want, 1e-12);
  const std::vector<double> ex{0, 1, 2, 4};
  EXPECT_NEAR(sigma_n_estimate(ex, 0.5), want, 1e-12);
  EXPECT_THROW(sigma_n_estimate(xi, std::vector<double>{1.0}, 0.5), std::invalid_argument);
}

TEST(SigmaN, IntervalHalfWidth) {
  NaiveReport r;
  r.cvar_hat = 10;
  r.sigma_n = 2;
  r.n_steps = 400;
  fill_interval(r, 0.95);
  EXPECT_NEAR(r.ci_high - 10, 1.959963984540054 * 0.1, 1e-9);
  EXPECT_NEAR(10 - r.ci_low, 1.959963984540054 * 0.1, 1e-9);
}
