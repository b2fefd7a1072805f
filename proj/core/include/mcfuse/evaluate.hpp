#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/merge.hpp"

namespace mcfuse {

/// Fraction of instances whose argmax choice is the answer. Never skips.
double accuracy(std::span<const Distribution> merged, std::span<const std::size_t> answers);
inline double accuracy(const MergedForecast& merged, std::span<const std::size_t> answers) {
  return accuracy(merged.distributions, answers);
}

/// Geometric mean of the probabilities given to correct answers (0 if any is 0).
double mean_likelihood(std::span<const Distribution> merged, std::span<const std::size_t> answers);

struct PenaltyOutcome {
  double score = 0.0;
  std::size_t answered = 0;
  std::size_t skipped = 0;
  std::size_t right = 0;
  std::size_t wrong = 0;
};

inline constexpr double kDefaultPenalty = 0.5;
inline constexpr double kDefaultThreshold = 1.0 / 3.0;

/// +1 per right answer, -penalty per wrong one, 0 per skip. An instance is
/// answered only when its top probability is strictly above `threshold`.
PenaltyOutcome penalty_score(std::span<const Distribution> merged, std::span<const std::size_t> answers,
                             double penalty = kDefaultPenalty, double threshold = kDefaultThreshold);
inline PenaltyOutcome penalty_score(const MergedForecast& merged, std::span<const std::size_t> answers,
                                    double penalty = kDefaultPenalty,
                                    double threshold = kDefaultThreshold) {
  return penalty_score(merged.distributions, answers, penalty, threshold);
}

/// Top probability at which guessing and skipping have equal expected
/// utility: penalty / (1 + penalty).
double expected_utility_threshold(double penalty);

/// Regularized incomplete beta I_x(a, b), by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact two-sided binomial (Clopper-Pearson) interval for correct/total.
/// Endpoints are Beta quantiles found by bisection to 1e-10.
Interval clopper_pearson(std::size_t correct, std::size_t total, double level = 0.95);

struct EvaluationOptions {
  double penalty = kDefaultPenalty;
  double threshold = kDefaultThreshold;
  double level = 0.95;
};

struct EvaluationReport {
  std::size_t instances = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double mean_likelihood = 0.0;
  double penalty_score = 0.0;
  std::size_t answered = 0;
  std::size_t skipped = 0;
  Interval ci95;
};

EvaluationReport evaluate(std::span<const Distribution> merged, std::span<const std::size_t> answers,
                          const EvaluationOptions& options = {});
inline EvaluationReport evaluate(const MergedForecast& merged, std::span<const std::size_t> answers,
                                 const EvaluationOptions& options = {}) {
  return evaluate(merged.distributions, answers, options);
}

/// One line of a results table: a solver name and its report.
struct ReportRow {
  std::string name;
  EvaluationReport report;
};

/// Fixed-width table with accuracy, mean likelihood, penalty score and the
/// exact 95% interval per row.
void write_table(std::ostream& out, std::span<const ReportRow> rows);

}  // namespace mcfuse
