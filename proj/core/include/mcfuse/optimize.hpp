#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mcfuse/core.hpp"

namespace mcfuse {

/// Free constants of the restart hill-climber.
struct OptimizerParams {
  double fd_delta = 0.01;          ///< finite-difference half-step
  double grad_clip = 0.05;         ///< per-component truncation of the ascent direction
  double step_size = 0.05;         ///< largest per-component move of a full step
  int step_budget = 500;           ///< gradient evaluations per hillclimb
  double grad_norm_stop = 2.0;     ///< stop once the projected gradient norm drops below
  int restarts = 10;
  std::uint64_t seed = 1;
  double smoothing_epsilon = 1e-5; ///< applied before training mixture and logarithmic rules

  /// Throws InvalidParameter when a field is out of range.
  void validate() const;
};

/// Sum over instances of ln D_{a(h)}. Returns -infinity when some correct
/// answer receives zero probability.
double log_likelihood(const WeightVector& w, const ForecastSet& forecasts,
                      std::span<const std::size_t> answers);

/// exp(log_likelihood / m): the geometric mean probability of correct answers.
double mean_likelihood(const WeightVector& w, const ForecastSet& forecasts,
                       std::span<const std::size_t> answers);

/// Central differences of the log-likelihood; one-sided where a probe
/// would leave the rule's weight box or land on -infinity.
std::vector<double> estimate_gradient(const WeightVector& w, const ForecastSet& forecasts,
                                      std::span<const std::size_t> answers, double fd_delta);

struct HillclimbResult {
  WeightVector weights;
  double log_likelihood = 0.0;
  int steps = 0;          ///< gradient evaluations used
  bool converged = false; ///< stopped on the gradient-norm test rather than the budget
};

/// Projected ascent from w0. Every accepted step increases the
/// log-likelihood; a step that would not is halved until it does or the
/// climb stops.
HillclimbResult hillclimb(const WeightVector& w0, const ForecastSet& forecasts,
                          std::span<const std::size_t> answers, const OptimizerParams& params);

struct RestartTrace {
  std::vector<double> start;
  std::vector<double> end;
  double log_likelihood = 0.0;
  int steps = 0;
  bool converged = false;
};

struct TrainingReport {
  WeightVector best_weights;
  double log_likelihood = 0.0;
  double mean_likelihood = 0.0;
  std::size_t best_restart = 0;
  std::vector<RestartTrace> restarts;
};

/// Uniform random starting points, one per restart, drawn from params.seed.
std::vector<std::vector<double>> restart_starts(Rule rule, std::size_t modules,
                                                const OptimizerParams& params);

/// Restart hill-climbing for the maximum-likelihood weights of `rule`.
/// Mixture and logarithmic rules train on smoothed forecasts, the product
/// rule on the raw ones. Deterministic for a fixed seed.
TrainingReport optimize(Rule rule, const ForecastSet& forecasts,
                        std::span<const std::size_t> answers, const OptimizerParams& params);

/// The forecasts a rule is trained and evaluated on (smoothed unless product).
ForecastSet training_view(Rule rule, const ForecastSet& forecasts, double smoothing_epsilon);

}  // namespace mcfuse
