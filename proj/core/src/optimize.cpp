#include "mcfuse/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "mcfuse/merge.hpp"
#include "mcfuse/random.hpp"

namespace mcfuse {

namespace {

constexpr double kMinStepScale = 1e-10;

void check_answers(const ForecastSet& forecasts, std::span<const std::size_t> answers) {
  if (answers.size() != forecasts.instances()) {
    throw ConsistencyError("answer count " + std::to_string(answers.size()) +
                           " differs from forecast instances " + std::to_string(forecasts.instances()));
  }
  for (std::size_t a : answers) {
    if (a >= forecasts.choices()) throw ConsistencyError("answer index out of range");
  }
}

// Log-likelihood over raw weight values, reusing one output buffer.
class Objective {
public:
  Objective(Rule rule, const ForecastSet& forecasts, std::span<const std::size_t> answers)
      : rule_(rule), forecasts_(forecasts), answers_(answers), buffer_(forecasts.choices()) {}

  double operator()(std::span<const double> weights) {
    double total = 0.0;
    for (std::size_t h = 0; h < forecasts_.instances(); ++h) {
      detail::merge_block(rule_, forecasts_.block(h), forecasts_.choices(), weights, buffer_);
      const double p = buffer_[answers_[h]];
      if (p <= 0.0) return -std::numeric_limits<double>::infinity();
      total += std::log(p);
    }
    return total;
  }

  Rule rule() const { return rule_; }

private:
  Rule rule_;
  const ForecastSet& forecasts_;
  std::span<const std::size_t> answers_;
  std::vector<double> buffer_;
};

std::vector<double> gradient(Objective& objective, std::vector<double> w, double center, double delta) {
  const auto box = weight_bounds(objective.rule());
  std::vector<double> g(w.size(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wi = w[i];
    const bool can_up = wi + delta <= box.high;
    const bool can_down = wi - delta >= box.low;
    double up = -std::numeric_limits<double>::infinity();
    double down = -std::numeric_limits<double>::infinity();
    if (can_up) {
      w[i] = wi + delta;
      up = objective(w);
    }
    if (can_down) {
      w[i] = wi - delta;
      down = objective(w);
    }
    w[i] = wi;

    const bool up_ok = can_up && std::isfinite(up);
    const bool down_ok = can_down && std::isfinite(down);
    if (up_ok && down_ok) {
      g[i] = (up - down) / (2.0 * delta);
    } else if (up_ok) {
      g[i] = (up - center) / delta;
    } else if (down_ok) {
      g[i] = (center - down) / delta;
    }
    // Neither probe finite: no usable slope along this axis.
  }
  return g;
}

}  // namespace

void OptimizerParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidParameter(std::string("optimizer parameter ") + name + " must be positive");
    }
  };
  positive(fd_delta, "fd_delta");
  positive(grad_clip, "grad_clip");
  positive(step_size, "step_size");
  positive(grad_norm_stop, "grad_norm_stop");
  if (fd_delta >= 0.5) throw InvalidParameter("optimizer parameter fd_delta must be below 0.5");
  if (!(smoothing_epsilon >= 0.0)) throw InvalidParameter("smoothing_epsilon must be >= 0");
  if (step_budget < 1) throw InvalidParameter("step_budget must be >= 1");
  if (restarts < 1) throw InvalidParameter("restarts must be >= 1");
}

double log_likelihood(const WeightVector& w, const ForecastSet& forecasts,
                      std::span<const std::size_t> answers) {
  check_answers(forecasts, answers);
  if (w.size() != forecasts.modules()) throw ConsistencyError("one weight per module required");
  Objective objective(w.rule(), forecasts, answers);
  return objective(w.values());
}

double mean_likelihood(const WeightVector& w, const ForecastSet& forecasts,
                       std::span<const std::size_t> answers) {
  if (answers.empty()) throw InvalidParameter("mean likelihood of an empty set");
  return std::exp(log_likelihood(w, forecasts, answers) / static_cast<double>(answers.size()));
}

std::vector<double> estimate_gradient(const WeightVector& w, const ForecastSet& forecasts,
                                      std::span<const std::size_t> answers, double fd_delta) {
  check_answers(forecasts, answers);
  if (!(fd_delta > 0.0)) throw InvalidParameter("fd_delta must be positive");
  Objective objective(w.rule(), forecasts, answers);
  std::vector<double> weights(w.values().begin(), w.values().end());
  const double center = objective(weights);
  return gradient(objective, std::move(weights), center, fd_delta);
}

HillclimbResult hillclimb(const WeightVector& w0, const ForecastSet& forecasts,
                          std::span<const std::size_t> answers, const OptimizerParams& params) {
  params.validate();
  check_answers(forecasts, answers);
  if (w0.size() != forecasts.modules()) throw ConsistencyError("one weight per module required");

  const Rule rule = w0.rule();
  const auto box = weight_bounds(rule);
  Objective objective(rule, forecasts, answers);

  std::vector<double> w(w0.values().begin(), w0.values().end());
  double score = objective(w);
  HillclimbResult result;

  std::vector<double> candidate(w.size());
  std::vector<double> direction(w.size());
  while (result.steps < params.step_budget) {
    auto g = gradient(objective, w, score, params.fd_delta);
    ++result.steps;

    // Zero components that push a weight through its bound.
    double norm2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if ((w[i] <= box.low && g[i] < 0.0) || (w[i] >= box.high && g[i] > 0.0)) g[i] = 0.0;
      norm2 += g[i] * g[i];
    }
    if (std::sqrt(norm2) < params.grad_norm_stop) {
      result.converged = true;
      break;
    }

    double largest = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      direction[i] = std::clamp(g[i], -params.grad_clip, params.grad_clip);
      largest = std::max(largest, std::abs(direction[i]));
    }

    bool accepted = false;
    for (double scale = params.step_size / largest; scale * largest >= kMinStepScale; scale *= 0.5) {
      bool moved = false;
      for (std::size_t i = 0; i < w.size(); ++i) {
        candidate[i] = std::clamp(w[i] + scale * direction[i], box.low, box.high);
        moved = moved || candidate[i] != w[i];
      }
      if (!moved) break;
      const double candidate_score = objective(candidate);
      if (candidate_score > score) {
        w.swap(candidate);
        score = candidate_score;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No improving step at any resolution: a constrained local maximum.
      result.converged = true;
      break;
    }
  }

  result.weights = WeightVector(rule, w0.module_ids(), w);
  result.log_likelihood = score;
  return result;
}

std::vector<std::vector<double>> restart_starts(Rule rule, std::size_t modules,
                                                const OptimizerParams& params) {
  const auto box = weight_bounds(rule);
  Rng rng(params.seed);
  std::vector<std::vector<double>> starts(static_cast<std::size_t>(params.restarts));
  for (auto& start : starts) {
    start.resize(modules);
    for (double& w : start) w = box.low + (box.high - box.low) * uniform01(rng);
  }
  return starts;
}

ForecastSet training_view(Rule rule, const ForecastSet& forecasts, double smoothing_epsilon) {
  return rule == Rule::product ? forecasts : forecasts.smoothed(smoothing_epsilon);
}

TrainingReport optimize(Rule rule, const ForecastSet& forecasts,
                        std::span<const std::size_t> answers, const OptimizerParams& params) {
  params.validate();
  check_answers(forecasts, answers);
  if (answers.empty()) throw InvalidParameter("cannot train on an empty question set");

  const ForecastSet data = training_view(rule, forecasts, params.smoothing_epsilon);
  const auto starts = restart_starts(rule, data.modules(), params);

  // Restarts are independent; collect in index order so completion order
  // never affects the report.
  std::vector<std::future<HillclimbResult>> pending;
  pending.reserve(starts.size());
  for (const auto& start : starts) {
    pending.push_back(std::async(std::launch::async, [&, start] {
      return hillclimb(WeightVector(rule, data.module_ids(), start), data, answers, params);
    }));
  }

  TrainingReport report;
  for (std::size_t r = 0; r < pending.size(); ++r) {
    HillclimbResult climb = pending[r].get();
    const auto end = climb.weights.values();
    report.restarts.push_back(RestartTrace{starts[r], std::vector<double>(end.begin(), end.end()),
                                           climb.log_likelihood, climb.steps, climb.converged});
    if (r == 0 || climb.log_likelihood > report.log_likelihood) {
      report.best_restart = r;
      report.best_weights = climb.weights;
      report.log_likelihood = climb.log_likelihood;
    }
  }
  report.mean_likelihood = std::exp(report.log_likelihood / static_cast<double>(answers.size()));
  return report;
}

}  // namespace mcfuse
