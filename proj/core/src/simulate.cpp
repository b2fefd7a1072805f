#include "mcfuse/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcfuse/random.hpp"

namespace mcfuse {

namespace {

// Fisher-Yates with the library's portable index draw.
void shuffle(std::vector<char>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::swap(values[i - 1], values[uniform_index(rng, i)]);
  }
}

std::vector<double> emitted(const GenerativeSpec& spec, double accuracy, std::size_t guess) {
  const double rest = spec.mode == GeneratorMode::calibrated
                          ? (1.0 - accuracy) / static_cast<double>(spec.k - 1)
                          : 0.0;
  std::vector<double> probs(spec.k, rest);
  probs[guess] = spec.mode == GeneratorMode::calibrated ? accuracy : 1.0;
  return probs;
}

}  // namespace

std::string_view to_string(GeneratorMode mode) {
  return mode == GeneratorMode::calibrated ? "calibrated" : "one-hot";
}

GeneratorMode parse_generator_mode(std::string_view name) {
  if (name == "calibrated") return GeneratorMode::calibrated;
  if (name == "one-hot" || name == "one_hot") return GeneratorMode::one_hot;
  throw InvalidParameter("unknown generator mode: " + std::string(name));
}

void GenerativeSpec::validate() const {
  if (k < 2) throw InvalidParameter("generator needs k >= 2");
  if (m < 1) throw InvalidParameter("generator needs m >= 1");
  const double chance = 1.0 / static_cast<double>(k);
  for (double a : module_accuracies) {
    if (!(a > chance && a <= 1.0)) {
      throw InvalidParameter("module accuracy " + std::to_string(a) + " outside (1/k, 1]");
    }
  }
}

SyntheticDataset gen_calibrated_independent(const GenerativeSpec& spec) {
  spec.validate();
  const std::size_t n = spec.module_accuracies.size();
  Rng rng(spec.seed);

  // Fixed per-module correctness patterns, drawn before anything else.
  std::vector<std::vector<char>> fixed(n);
  if (spec.exact_counts) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto right = static_cast<std::size_t>(std::llround(spec.module_accuracies[i] * spec.m));
      fixed[i].assign(spec.m, 0);
      std::fill(fixed[i].begin(), fixed[i].begin() + static_cast<std::ptrdiff_t>(right), 1);
      shuffle(fixed[i], rng);
    }
  }

  SyntheticDataset ds;
  ds.spec = spec;
  ds.answers.resize(spec.m);
  ds.guesses.assign(spec.m, std::vector<std::size_t>(n));
  std::vector<std::vector<Distribution>> cells(spec.m);
  std::vector<std::string> instance_ids(spec.m);
  for (std::size_t h = 0; h < spec.m; ++h) {
    instance_ids[h] = "s" + std::to_string(h);
    const auto answer = static_cast<std::size_t>(uniform_index(rng, spec.k));
    ds.answers[h] = answer;
    cells[h].reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = spec.module_accuracies[i];
      const bool right = spec.exact_counts ? fixed[i][h] != 0 : uniform01(rng) < a;
      const std::size_t guess =
          right ? answer : (answer + 1 + static_cast<std::size_t>(uniform_index(rng, spec.k - 1))) % spec.k;
      ds.guesses[h][i] = guess;
      cells[h].emplace_back(emitted(spec, a, guess));
    }
  }
  std::vector<std::string> module_ids(n);
  for (std::size_t i = 0; i < n; ++i) module_ids[i] = "sim" + std::to_string(i);
  ds.forecasts = ForecastSet(std::move(instance_ids), std::move(module_ids), cells);
  return ds;
}

Distribution bayes_posterior(const GenerativeSpec& spec, std::span<const std::size_t> guesses) {
  spec.validate();
  if (guesses.size() > spec.module_accuracies.size()) {
    throw InvalidParameter("more guesses than modules in the generator spec");
  }
  const double prior = 1.0 / static_cast<double>(spec.k);
  std::vector<double> joint(spec.k);
  double evidence = 0.0;
  for (std::size_t j = 0; j < spec.k; ++j) {
    double p = prior;
    for (std::size_t i = 0; i < guesses.size(); ++i) {
      if (guesses[i] >= spec.k) throw InvalidParameter("guess index out of range");
      const double a = spec.module_accuracies[i];
      p *= guesses[i] == j ? a : (1.0 - a) / static_cast<double>(spec.k - 1);
    }
    joint[j] = p;
    evidence += p;
  }
  for (double& p : joint) p /= evidence;
  return Distribution(std::move(joint));
}

SyntheticDataset duplicate_module(const SyntheticDataset& ds, std::size_t i) {
  if (i >= ds.forecasts.modules()) throw InvalidParameter("no module " + std::to_string(i) + " to duplicate");
  std::vector<Distribution> column;
  column.reserve(ds.forecasts.instances());
  for (std::size_t h = 0; h < ds.forecasts.instances(); ++h) column.push_back(ds.forecasts.distribution(h, i));

  SyntheticDataset out = ds;
  out.forecasts = ds.forecasts.with_module(ds.forecasts.module_ids()[i] + "_dup", column);
  out.spec.module_accuracies.push_back(ds.spec.module_accuracies.at(i));
  for (std::size_t h = 0; h < out.guesses.size(); ++h) out.guesses[h].push_back(ds.guesses[h][i]);
  return out;
}

QuestionSet SyntheticDataset::questions() const {
  std::vector<Instance> instances;
  instances.reserve(answers.size());
  for (std::size_t h = 0; h < answers.size(); ++h) {
    Instance inst;
    inst.id = forecasts.instance_ids()[h];
    inst.stem = WordTuple(std::vector<std::string>{inst.id});
    for (std::size_t j = 0; j < spec.k; ++j) inst.choices.push_back(WordTuple(std::vector<std::string>{inst.id + "c" + std::to_string(j)}));
    inst.answer = answers[h];
    instances.push_back(std::move(inst));
  }
  return QuestionSet(std::move(instances));
}

}  // namespace mcfuse
