#include "mcfuse/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

namespace mcfuse {

namespace {

void check_sizes(std::span<const Distribution> merged, std::span<const std::size_t> answers) {
  if (merged.size() != answers.size()) {
    throw ConsistencyError("got " + std::to_string(merged.size()) + " forecasts for " +
                           std::to_string(answers.size()) + " answers");
  }
  for (std::size_t h = 0; h < merged.size(); ++h) {
    if (answers[h] >= merged[h].size()) throw ConsistencyError("answer index out of range");
  }
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  return h;
}

// Smallest p in [0, 1] with I_p(a, b) >= target; I_p is increasing in p.
double beta_quantile(double a, double b, double target) {
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_incomplete_beta(a, b, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double accuracy(std::span<const Distribution> merged, std::span<const std::size_t> answers) {
  check_sizes(merged, answers);
  if (merged.empty()) return 0.0;
  std::size_t correct = 0;
  for (std::size_t h = 0; h < merged.size(); ++h) {
    if (argmax_choice(merged[h]) == answers[h]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(merged.size());
}

double mean_likelihood(std::span<const Distribution> merged, std::span<const std::size_t> answers) {
  check_sizes(merged, answers);
  if (merged.empty()) throw InvalidParameter("mean likelihood of an empty set");
  double total = 0.0;
  for (std::size_t h = 0; h < merged.size(); ++h) {
    const double p = merged[h][answers[h]];
    if (p <= 0.0) return 0.0;
    total += std::log(p);
  }
  return std::exp(total / static_cast<double>(merged.size()));
}

PenaltyOutcome penalty_score(std::span<const Distribution> merged, std::span<const std::size_t> answers,
                             double penalty, double threshold) {
  check_sizes(merged, answers);
  if (!(penalty >= 0.0)) throw InvalidParameter("penalty must be >= 0");
  PenaltyOutcome out;
  for (std::size_t h = 0; h < merged.size(); ++h) {
    const std::size_t guess = argmax_choice(merged[h]);
    if (!(merged[h][guess] > threshold)) {
      ++out.skipped;
      continue;
    }
    ++out.answered;
    if (guess == answers[h]) {
      ++out.right;
    } else {
      ++out.wrong;
    }
  }
  out.score = static_cast<double>(out.right) - penalty * static_cast<double>(out.wrong);
  return out;
}

double expected_utility_threshold(double penalty) {
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw InvalidParameter("penalty must be >= 0");
  return penalty / (1.0 + penalty);
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidParameter("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

Interval clopper_pearson(std::size_t correct, std::size_t total, double level) {
  if (total == 0) throw InvalidParameter("binomial interval needs at least one trial");
  if (correct > total) throw InvalidParameter("more successes than trials");
  if (!(level > 0.0 && level < 1.0)) throw InvalidParameter("confidence level must be in (0, 1)");
  const double alpha = 1.0 - level;
  const double x = static_cast<double>(correct);
  const double n = static_cast<double>(total);
  Interval ci;
  ci.low = correct == 0 ? 0.0 : beta_quantile(x, n - x + 1.0, alpha / 2.0);
  ci.high = correct == total ? 1.0 : beta_quantile(x + 1.0, n - x, 1.0 - alpha / 2.0);
  return ci;
}

EvaluationReport evaluate(std::span<const Distribution> merged, std::span<const std::size_t> answers,
                          const EvaluationOptions& options) {
  check_sizes(merged, answers);
  if (merged.empty()) throw InvalidParameter("cannot evaluate an empty set");
  EvaluationReport report;
  report.instances = merged.size();
  for (std::size_t h = 0; h < merged.size(); ++h) {
    if (argmax_choice(merged[h]) == answers[h]) ++report.correct;
  }
  report.accuracy = static_cast<double>(report.correct) / static_cast<double>(report.instances);
  report.mean_likelihood = mean_likelihood(merged, answers);
  const auto penalty = penalty_score(merged, answers, options.penalty, options.threshold);
  report.penalty_score = penalty.score;
  report.answered = penalty.answered;
  report.skipped = penalty.skipped;
  report.ci95 = clopper_pearson(report.correct, report.instances, options.level);
  return report;
}

void write_table(std::ostream& out, std::span<const ReportRow> rows) {
  std::size_t width = 6;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %9s  %10s  %8s  %8s  %17s\n", static_cast<int>(width), "Solver",
                "Accuracy", "Mean lik.", "Penalty", "Skipped", "95% interval");
  out << line;
  out << std::string(width + 64, '-') << '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::snprintf(line, sizeof line, "%-*s  %8.2f%%  %10.4f  %8.1f  %8zu  %6.2f%%-%6.2f%%\n",
                  static_cast<int>(width), row.name.c_str(), 100.0 * r.accuracy, r.mean_likelihood,
                  r.penalty_score, r.skipped, 100.0 * r.ci95.low, 100.0 * r.ci95.high);
    out << line;
  }
}

}  // namespace mcfuse
