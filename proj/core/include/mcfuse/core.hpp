#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mcfuse {

// ---------------------------------------------------------------------------
// Errors. Each maps onto one CLI exit code (see tools/commands.hpp).

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A raw score vector carried a negative or non-finite entry.
struct InvalidScore : Error {
  using Error::Error;
};

/// A numeric parameter (epsilon, penalty, weight, ...) is out of range.
struct InvalidParameter : Error {
  using Error::Error;
};

/// A logarithm of zero was requested; smooth the forecasts first.
struct DomainError : Error {
  using Error::Error;
};

/// Rule tag and weight vector disagree, or a module configuration is bad.
struct ConfigError : Error {
  using Error::Error;
};

/// Malformed file or missing resource.
struct InputError : Error {
  using Error::Error;
};

/// Two inputs that must describe the same data do not (cache vs questions).
struct ConsistencyError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Questions

enum class TaskKind { synonym, analogy };

std::string_view to_string(TaskKind kind);

/// Case-folds and strips surrounding punctuation. May return an empty string.
std::string normalize_token(std::string_view raw);

/// One word (synonym task) or an ordered word pair (analogy task).
class WordTuple {
public:
  WordTuple() = default;
  explicit WordTuple(std::vector<std::string> words);
  WordTuple(std::initializer_list<std::string_view> words);

  std::size_t arity() const { return words_.size(); }
  const std::string& operator[](std::size_t i) const { return words_.at(i); }
  const std::vector<std::string>& words() const { return words_; }

  friend bool operator==(const WordTuple&, const WordTuple&) = default;

private:
  std::vector<std::string> words_;
};

struct Instance {
  std::string id;
  WordTuple stem;
  std::vector<WordTuple> choices;
  std::size_t answer = 0;

  std::size_t k() const { return choices.size(); }

  /// Throws InputError unless k >= 2, the answer is in range and every
  /// choice has the stem's arity.
  void validate() const;

  friend bool operator==(const Instance&, const Instance&) = default;
};

class QuestionSet {
public:
  QuestionSet() = default;
  explicit QuestionSet(std::vector<Instance> instances);

  TaskKind task_kind() const { return kind_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }
  std::size_t k() const { return instances_.empty() ? 0 : instances_.front().k(); }
  const Instance& operator[](std::size_t h) const { return instances_.at(h); }
  const std::vector<Instance>& instances() const { return instances_; }

  std::vector<std::size_t> answers() const;
  std::vector<std::string> ids() const;

  friend bool operator==(const QuestionSet&, const QuestionSet&) = default;

private:
  std::vector<Instance> instances_;
  TaskKind kind_ = TaskKind::synonym;
};

// ---------------------------------------------------------------------------
// Distributions

inline constexpr double kSumTolerance = 1e-9;

/// A probability vector over one instance's choices. Entries are nonnegative
/// and sum to one within kSumTolerance.
class Distribution {
public:
  Distribution() = default;

  /// Accepts a vector that already satisfies the invariants; throws
  /// InvalidScore otherwise.
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t k);

  /// Ingestion path for external data: rejects negative or non-finite
  /// entries, renormalizes sums outside tolerance. Sets *renormalized when
  /// that happened.
  static Distribution ingest(std::vector<double> probs, bool* renormalized = nullptr);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t j) const { return probs_[j]; }
  std::span<const double> probs() const { return probs_; }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

  friend bool operator==(const Distribution&, const Distribution&) = default;

private:
  std::vector<double> probs_;
};

/// Scales nonnegative scores to sum to one. All-zero input gives uniform.
Distribution normalize(std::span<const double> raw);

/// (d_j + epsilon) / (1 + k * epsilon).
Distribution smooth(const Distribution& d, double epsilon);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_choice(std::span<const double> probs);
inline std::size_t argmax_choice(const Distribution& d) { return argmax_choice(d.probs()); }

// ---------------------------------------------------------------------------
// Forecasts

/// Module outputs p[h][i][j] for m instances, n modules and k choices, stored
/// row-major so each instance's n x k block is contiguous.
class ForecastSet {
public:
  ForecastSet() = default;

  /// cells[h][i] is module i's forecast on instance h. The grid must be
  /// complete and every distribution must have length k.
  ForecastSet(std::vector<std::string> instance_ids, std::vector<std::string> module_ids,
              const std::vector<std::vector<Distribution>>& cells);

  std::size_t instances() const { return instance_ids_.size(); }
  std::size_t modules() const { return module_ids_.size(); }
  std::size_t choices() const { return k_; }

  const std::vector<std::string>& instance_ids() const { return instance_ids_; }
  const std::vector<std::string>& module_ids() const { return module_ids_; }

  std::span<const double> forecast(std::size_t h, std::size_t i) const;
  /// The n x k block for instance h.
  std::span<const double> block(std::size_t h) const;
  Distribution distribution(std::size_t h, std::size_t i) const;

  ForecastSet smoothed(double epsilon) const;
  ForecastSet select_modules(std::span<const std::size_t> keep) const;
  ForecastSet with_module(std::string module_id, const std::vector<Distribution>& column) const;

  friend bool operator==(const ForecastSet&, const ForecastSet&) = default;

private:
  std::vector<std::string> instance_ids_;
  std::vector<std::string> module_ids_;
  std::size_t k_ = 0;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Weights

enum class Rule { mixture, logarithmic, product };

std::string_view to_string(Rule rule);
/// Throws ConfigError on an unknown name.
Rule parse_rule(std::string_view name);

/// Upper bound on logarithmic-rule weights; the optimizer searches [0, 10].
inline constexpr double kLogWeightMax = 10.0;

struct WeightBounds {
  double low;
  double high;
};

WeightBounds weight_bounds(Rule rule);

class WeightVector {
public:
  WeightVector() = default;
  /// Throws InvalidParameter when a weight leaves the rule's box or the
  /// sizes differ.
  WeightVector(Rule rule, std::vector<std::string> module_ids, std::vector<double> weights);
  /// Unnamed modules get ids "m0", "m1", ...
  WeightVector(Rule rule, std::vector<double> weights);

  Rule rule() const { return rule_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const { return weights_; }
  const std::vector<std::string>& module_ids() const { return module_ids_; }

  /// Weight for a module id; throws ConfigError when absent.
  double weight_of(std::string_view module_id) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

private:
  Rule rule_ = Rule::product;
  std::vector<std::string> module_ids_;
  std::vector<double> weights_;
};

}  // namespace mcfuse
