#pragma once

#include <cstdint>
#include <vector>

#include "mcfuse/core.hpp"

namespace mcfuse {

enum class GeneratorMode {
  /// Mass a_i on the guess, (1 - a_i) / (k - 1) on every other choice.
  calibrated,
  /// Probability 1 on the guess: accurate but overconfident.
  one_hot,
};

std::string_view to_string(GeneratorMode mode);
GeneratorMode parse_generator_mode(std::string_view name);

/// Synthetic modules that guess the hidden answer independently.
struct GenerativeSpec {
  std::size_t k = 4;
  std::vector<double> module_accuracies;
  std::size_t m = 1000;
  std::uint64_t seed = 1;
  GeneratorMode mode = GeneratorMode::calibrated;
  /// When set, module i is right on exactly round(a_i * m) instances
  /// (positions shuffled) instead of each instance independently.
  bool exact_counts = false;

  /// Throws InvalidParameter unless k >= 2, m >= 1 and every accuracy is in (1/k, 1].
  void validate() const;
};

struct SyntheticDataset {
  GenerativeSpec spec;
  ForecastSet forecasts;
  std::vector<std::size_t> answers;
  /// guesses[h][i]: the choice module i favoured on instance h.
  std::vector<std::vector<std::size_t>> guesses;

  /// Placeholder synonym questions ("s17" vs "s17c0", ...) matching the
  /// forecasts, so synthetic data can go through the file-based pipeline.
  QuestionSet questions() const;
};

/// Answers are uniform over k. Module i independently guesses the answer
/// with probability a_i and otherwise a uniformly chosen wrong choice.
SyntheticDataset gen_calibrated_independent(const GenerativeSpec& spec);

/// Pr(A = j | guesses) for the generative model, by enumerating the k
/// candidate answers under a uniform prior.
Distribution bayes_posterior(const GenerativeSpec& spec, std::span<const std::size_t> guesses);

/// Appends an exact copy of module i (id suffixed "_dup").
SyntheticDataset duplicate_module(const SyntheticDataset& ds, std::size_t i);

}  // namespace mcfuse
