#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mcfuse/merge.hpp"
#include "mcfuse/optimize.hpp"
#include "mcfuse/simulate.hpp"
#include "support.hpp"

namespace mcfuse {
namespace {

SyntheticDataset one_hot_module(double a, std::size_t k, std::size_t m, std::uint64_t seed = 4) {
  GenerativeSpec spec;
  spec.k = k;
  spec.module_accuracies = {a};
  spec.m = m;
  spec.seed = seed;
  spec.mode = GeneratorMode::one_hot;
  spec.exact_counts = true;
  return gen_calibrated_independent(spec);
}

// Hand-derived gradient of the mixture log-likelihood:
// dS/dw_i = sum_h p_{i,a(h)} / M_{a(h)} - m / sum_i w_i.
std::vector<double> mixture_gradient(const std::vector<double>& w, const ForecastSet& fs,
                                     const std::vector<std::size_t>& answers) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t h = 0; h < fs.instances(); ++h) {
    double m_a = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) m_a += w[i] * fs.forecast(h, i)[answers[h]];
    for (std::size_t i = 0; i < w.size(); ++i) g[i] += fs.forecast(h, i)[answers[h]] / m_a - 1.0 / total;
  }
  return g;
}

double best_grid_weight(const ForecastSet& fs, const std::vector<std::size_t>& answers, double step) {
  double best_w = 0.0;
  double best = -HUGE_VAL;
  for (int s = 0; s * step <= 1.0 + 1e-12; ++s) {
    const double w = std::min(1.0, s * step);
    const double ll = log_likelihood(WeightVector(Rule::product, fs.module_ids(), {w}), fs, answers);
    if (ll > best) {
      best = ll;
      best_w = w;
    }
  }
  return best_w;
}

TEST(LogLikelihood, Examples) {
  std::vector<std::string> ids;
  std::vector<std::vector<Distribution>> perfect;
  std::vector<std::vector<Distribution>> uniform;
  std::vector<std::size_t> answers;
  for (std::size_t h = 0; h < 10; ++h) {
    ids.push_back("h" + std::to_string(h));
    std::vector<double> one_hot(4, 0.0);
    one_hot[h % 4] = 1.0;
    perfect.push_back({Distribution(one_hot)});
    uniform.push_back({Distribution::uniform(4)});
    answers.push_back(h % 4);
  }
  const ForecastSet p(ids, {"m"}, perfect);
  const ForecastSet u(ids, {"m"}, uniform);
  EXPECT_DOUBLE_EQ(log_likelihood(WeightVector(Rule::product, {"m"}, {1.0}), p, answers), 0.0);
  EXPECT_DOUBLE_EQ(mean_likelihood(WeightVector(Rule::product, {"m"}, {1.0}), p, answers), 1.0);
  EXPECT_NEAR(log_likelihood(WeightVector(Rule::mixture, {"m"}, {0.7}), u, answers), 10 * std::log(0.25), 1e-12);
  EXPECT_NEAR(log_likelihood(WeightVector(Rule::mixture, {"m"}, {0.7}), u, answers), -13.8629, 1e-4);
  EXPECT_NEAR(mean_likelihood(WeightVector(Rule::product, {"m"}, {0.3}), u, answers), 0.25, 1e-12);
}

TEST(LogLikelihood, ClosedFormForOneHotModule) {
  const auto ds = one_hot_module(0.85, 4, 1000);
  const WeightVector w(Rule::product, ds.forecasts.module_ids(), {0.8});
  EXPECT_NEAR(log_likelihood(w, ds.forecasts, ds.answers), 850 * std::log(0.85) + 150 * std::log(0.05), 1e-9);
  EXPECT_NEAR(mean_likelihood(w, ds.forecasts, ds.answers), std::pow(0.85, 0.85) * std::pow(0.05, 0.15), 1e-12);
  EXPECT_NEAR(mean_likelihood(w, ds.forecasts, ds.answers), 0.5557, 1e-4);
}

TEST(LogLikelihood, ZeroProbabilityIsNegativeInfinity) {
  const auto ds = one_hot_module(0.85, 4, 100);
  const WeightVector w(Rule::product, ds.forecasts.module_ids(), {1.0});
  EXPECT_EQ(log_likelihood(w, ds.forecasts, ds.answers), -HUGE_VAL);
  EXPECT_EQ(mean_likelihood(w, ds.forecasts, ds.answers), 0.0);
}

TEST(LogLikelihood, SizeMismatchIsConsistencyError) {
  const auto ds = one_hot_module(0.85, 4, 10);
  const WeightVector w(Rule::product, ds.forecasts.module_ids(), {0.5});
  std::vector<std::size_t> short_answers(ds.answers.begin(), ds.answers.begin() + 5);
  EXPECT_THROW(log_likelihood(w, ds.forecasts, short_answers), ConsistencyError);
}

TEST(EstimateGradient, MatchesAnalyticMixtureGradient) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uw(0.2, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    const auto fs = test::random_forecasts(rng, 12, 3, 4).smoothed(1e-5);
    const auto answers = test::random_answers(rng, 12, 4);
    std::vector<double> w(3);
    for (auto& x : w) x = uw(rng);
    const auto fd = estimate_gradient(WeightVector(Rule::mixture, fs.module_ids(), w), fs, answers, 1e-4);
    const auto exact = mixture_gradient(w, fs, answers);
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      diff += (fd[i] - exact[i]) * (fd[i] - exact[i]);
      norm += exact[i] * exact[i];
    }
    EXPECT_LE(std::sqrt(diff), 1e-4 * std::sqrt(norm)) << "trial " << trial;
  }
}

TEST(EstimateGradient, FlatObjectiveHasZeroGradient) {
  // One module, mixture rule: S(w) = sum ln(w p_a / w) is flat, so every
  // difference quotient is 0 whatever the step.
  std::mt19937_64 rng(4);
  const auto fs = test::random_forecasts(rng, 8, 1, 3);
  const auto answers = test::random_answers(rng, 8, 3);
  const auto g = estimate_gradient(WeightVector(Rule::mixture, fs.module_ids(), {0.5}), fs, answers, 0.01);
  EXPECT_NEAR(g[0], 0.0, 1e-9);
}

TEST(EstimateGradient, OneSidedAtTheBox) {
  const auto ds = one_hot_module(0.85, 4, 400);
  const auto ll = [&](double w) {
    return log_likelihood(WeightVector(Rule::product, ds.forecasts.module_ids(), {w}), ds.forecasts, ds.answers);
  };
  const double d = 0.01;
  const auto at_low = estimate_gradient(WeightVector(Rule::product, ds.forecasts.module_ids(), {0.0}),
                                        ds.forecasts, ds.answers, d);
  EXPECT_NEAR(at_low[0], (ll(d) - ll(0.0)) / d, 1e-9);

  // At w = 1 only the lower probe stays in the box.
  GenerativeSpec spec;
  spec.module_accuracies = {0.85};
  spec.m = 400;
  const auto cal = gen_calibrated_independent(spec);
  const auto cal_ll = [&](double w) {
    return log_likelihood(WeightVector(Rule::product, cal.forecasts.module_ids(), {w}), cal.forecasts, cal.answers);
  };
  const auto at_high = estimate_gradient(WeightVector(Rule::product, cal.forecasts.module_ids(), {1.0}),
                                         cal.forecasts, cal.answers, d);
  EXPECT_NEAR(at_high[0], (cal_ll(1.0) - cal_ll(1.0 - d)) / d, 1e-9);
}

TEST(Hillclimb, AlreadyOptimalStartStays) {
  const auto ds = one_hot_module(0.85, 4, 2000);
  const WeightVector w0(Rule::product, ds.forecasts.module_ids(), {0.8});
  const auto result = hillclimb(w0, ds.forecasts, ds.answers, OptimizerParams{});
  EXPECT_TRUE(result.converged);
  EXPECT_EQ(result.steps, 1);
  EXPECT_EQ(result.weights, w0);
}

TEST(Hillclimb, LikelihoodNeverDecreasesWithMoreBudget) {
  std::mt19937_64 rng(12);
  const auto fs = test::random_forecasts(rng, 60, 3, 4, true);
  const auto answers = test::random_answers(rng, 60, 4);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    const auto data = training_view(r, fs, 1e-5);
    const WeightVector w0(r, data.module_ids(), std::vector<double>(3, r == Rule::logarithmic ? 0.3 : 0.5));
    double previous = log_likelihood(w0, data, answers);
    for (int budget = 1; budget <= 40; ++budget) {
      OptimizerParams params;
      params.step_budget = budget;
      params.grad_norm_stop = 1e-9;
      const auto result = hillclimb(w0, data, answers, params);
      EXPECT_GE(result.log_likelihood, previous) << to_string(r) << " budget " << budget;
      previous = result.log_likelihood;
      for (double w : result.weights.values()) {
        EXPECT_GE(w, weight_bounds(r).low);
        EXPECT_LE(w, weight_bounds(r).high);
      }
    }
  }
}

TEST(Hillclimb, ProductWeightForOneHotModule) {
  const auto ds = one_hot_module(0.85, 4, 2000);
  const WeightVector w0(Rule::product, ds.forecasts.module_ids(), {0.2});
  const auto result = hillclimb(w0, ds.forecasts, ds.answers, OptimizerParams{});
  EXPECT_NEAR(result.weights[0], 0.8, 0.005);
}

TEST(Hillclimb, LogarithmicWeightForSmoothedOneHotModule) {
  const auto ds = one_hot_module(0.85, 4, 2000);
  const auto data = ds.forecasts.smoothed(1e-5);
  const WeightVector w0(Rule::logarithmic, data.module_ids(), {3.0});
  const auto result = hillclimb(w0, data, ds.answers, OptimizerParams{});
  EXPECT_NEAR(result.weights[0], std::log(17.0) / std::log(1e5 + 1), 0.003);
  EXPECT_NEAR(result.weights[0], 0.2461, 0.003);
}

TEST(Optimize, CalibrationRepairMatchesClosedForm) {
  for (std::size_t k : {3u, 4u, 5u}) {
    for (double a : {0.5, 0.7, 0.85, 0.95}) {
      const auto ds = one_hot_module(a, k, 1000, 31);
      const auto report = optimize(Rule::product, ds.forecasts, ds.answers, OptimizerParams{});
      const double closed = (a - 1.0 / k) / (1.0 - 1.0 / k);
      EXPECT_NEAR(report.best_weights[0], closed, 0.02) << "k=" << k << " a=" << a;
      EXPECT_NEAR(report.best_weights[0], best_grid_weight(ds.forecasts, ds.answers, 0.001), 0.02);
    }
  }
}

TEST(Optimize, SingleRestartEqualsSeededHillclimb) {
  std::mt19937_64 rng(6);
  const auto fs = test::random_forecasts(rng, 40, 2, 3, true);
  const auto answers = test::random_answers(rng, 40, 3);
  OptimizerParams params;
  params.restarts = 1;
  params.seed = 77;
  const auto report = optimize(Rule::product, fs, answers, params);
  const auto start = restart_starts(Rule::product, 2, params).front();
  const auto climb = hillclimb(WeightVector(Rule::product, fs.module_ids(), start), fs, answers, params);
  EXPECT_EQ(report.best_weights, climb.weights);
  EXPECT_EQ(report.log_likelihood, climb.log_likelihood);
}

TEST(Optimize, DeterministicAndBestOfRestarts) {
  std::mt19937_64 rng(8);
  const auto fs = test::random_forecasts(rng, 50, 3, 4, true);
  const auto answers = test::random_answers(rng, 50, 4);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    OptimizerParams params;
    params.seed = 5;
    const auto a = optimize(r, fs, answers, params);
    const auto b = optimize(r, fs, answers, params);
    EXPECT_EQ(a.best_weights, b.best_weights);
    EXPECT_EQ(a.log_likelihood, b.log_likelihood);
    ASSERT_EQ(a.restarts.size(), 10u);
    for (std::size_t i = 0; i < a.restarts.size(); ++i) {
      EXPECT_EQ(a.restarts[i].end, b.restarts[i].end);
      EXPECT_GE(a.log_likelihood, a.restarts[i].log_likelihood);
    }
    EXPECT_EQ(a.log_likelihood, a.restarts[a.best_restart].log_likelihood);
    EXPECT_NEAR(a.mean_likelihood, std::exp(a.log_likelihood / 50.0), 1e-15);
  }
}

TEST(Optimize, RestartStartsAreUniformInTheBox) {
  OptimizerParams params;
  params.restarts = 200;
  const auto starts = restart_starts(Rule::logarithmic, 3, params);
  double sum = 0.0;
  for (const auto& s : starts) {
    for (double w : s) {
      EXPECT_GE(w, 0.0);
      EXPECT_LT(w, kLogWeightMax);
      sum += w;
    }
  }
  EXPECT_NEAR(sum / 600.0, kLogWeightMax / 2, 0.5);
}

TEST(Optimize, DuplicatedModuleRecoversSingleModuleLikelihood) {
  GenerativeSpec spec;
  spec.k = 4;
  spec.module_accuracies = {0.85};
  spec.m = 1000;
  spec.mode = GeneratorMode::one_hot;
  spec.exact_counts = true;
  const auto ds = gen_calibrated_independent(spec);
  const auto dup = duplicate_module(ds, 0);
  const auto single = optimize(Rule::product, ds.forecasts, ds.answers, OptimizerParams{});
  const auto pair = optimize(Rule::product, dup.forecasts, dup.answers, OptimizerParams{});
  EXPECT_NEAR(pair.log_likelihood, single.log_likelihood, 1e-3);
}

TEST(Optimize, EnsembleBeatsEachModuleOnTrainingLikelihood) {
  GenerativeSpec spec;
  spec.k = 4;
  spec.module_accuracies = {0.5, 0.6, 0.7};
  spec.m = 1000;
  spec.seed = 3;
  const auto ds = gen_calibrated_independent(spec);
  const auto merged = optimize(Rule::product, ds.forecasts, ds.answers, OptimizerParams{});
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t keep[] = {i};
    const auto alone = optimize(Rule::product, ds.forecasts.select_modules(keep), ds.answers, OptimizerParams{});
    EXPECT_GE(merged.log_likelihood, alone.log_likelihood);
  }
}

TEST(OptimizerParams, Validation) {
  OptimizerParams p;
  EXPECT_NO_THROW(p.validate());
  p.restarts = 0;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.fd_delta = -1;
  EXPECT_THROW(p.validate(), InvalidParameter);
  p = {};
  p.grad_clip = 0;
  EXPECT_THROW(p.validate(), InvalidParameter);
}

}  // namespace
}  // namespace mcfuse
