#include "mcfuse/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace mcfuse {

namespace {

bool is_word_byte(unsigned char c) {
  // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them.
  return std::isalnum(c) || c >= 0x80;
}

double checked_sum(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidScore("score is not finite");
    if (v < 0.0) throw InvalidScore("score is negative: " + std::to_string(v));
    sum += v;
  }
  return sum;
}

}  // namespace

std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::synonym ? "synonym" : "analogy";
}

std::string normalize_token(std::string_view raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  while (begin < end && !is_word_byte(static_cast<unsigned char>(raw[begin]))) ++begin;
  while (end > begin && !is_word_byte(static_cast<unsigned char>(raw[end - 1]))) --end;
  std::string out(raw.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// ---------------------------------------------------------------------------

WordTuple::WordTuple(std::vector<std::string> words) : words_(std::move(words)) {
  if (words_.empty() || words_.size() > 2) {
    throw InputError("word tuple must hold 1 or 2 words, got " + std::to_string(words_.size()));
  }
  for (auto& w : words_) {
    w = normalize_token(w);
    if (w.empty()) throw InputError("word tuple contains an empty token");
  }
}

WordTuple::WordTuple(std::initializer_list<std::string_view> words)
    : WordTuple(std::vector<std::string>(words.begin(), words.end())) {}

void Instance::validate() const {
  if (id.empty()) throw InputError("instance without an id");
  if (choices.size() < 2) throw InputError("instance " + id + ": needs at least two choices");
  if (answer >= choices.size()) throw InputError("instance " + id + ": answer index out of range");
  if (stem.arity() == 0) throw InputError("instance " + id + ": empty stem");
  for (const auto& c : choices) {
    if (c.arity() != stem.arity()) {
      throw InputError("instance " + id + ": choice arity differs from stem arity");
    }
  }
}

QuestionSet::QuestionSet(std::vector<Instance> instances) : instances_(std::move(instances)) {
  std::unordered_set<std::string> seen;
  for (const auto& inst : instances_) {
    inst.validate();
    if (!seen.insert(inst.id).second) throw InputError("duplicate instance id: " + inst.id);
    if (inst.k() != instances_.front().k()) {
      throw InputError("instance " + inst.id + ": every instance in a set must have the same k");
    }
    if (inst.stem.arity() != instances_.front().stem.arity()) {
      throw InputError("instance " + inst.id + ": mixed synonym and analogy instances");
    }
  }
  if (!instances_.empty()) {
    kind_ = instances_.front().stem.arity() == 1 ? TaskKind::synonym : TaskKind::analogy;
  }
}

std::vector<std::size_t> QuestionSet::answers() const {
  std::vector<std::size_t> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(inst.answer);
  return out;
}

std::vector<std::string> QuestionSet::ids() const {
  std::vector<std::string> out;
  out.reserve(instances_.size());
  for (const auto& inst : instances_) out.push_back(inst.id);
  return out;
}

// ---------------------------------------------------------------------------

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw InvalidScore("empty distribution");
  double sum = checked_sum(probs_);
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw InvalidScore("distribution sums to " + std::to_string(sum));
  }
}

Distribution Distribution::uniform(std::size_t k) {
  if (k == 0) throw InvalidParameter("uniform distribution over zero choices");
  return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::ingest(std::vector<double> probs, bool* renormalized) {
  if (probs.empty()) throw InvalidScore("empty distribution");
  double sum = checked_sum(probs);
  bool fix = std::abs(sum - 1.0) > kSumTolerance;
  if (renormalized != nullptr) *renormalized = fix;
  if (!fix) return Distribution(std::move(probs));
  return normalize(probs);
}

Distribution normalize(std::span<const double> raw) {
  if (raw.empty()) throw InvalidScore("cannot normalize an empty score vector");
  double sum = checked_sum(raw);
  if (sum == 0.0) return Distribution::uniform(raw.size());
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= sum;
  return Distribution(std::move(out));
}

Distribution smooth(const Distribution& d, double epsilon) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("smoothing epsilon must be a finite value >= 0");
  }
  if (epsilon == 0.0) return d;
  const double denom = 1.0 + static_cast<double>(d.size()) * epsilon;
  std::vector<double> out(d.begin(), d.end());
  for (double& v : out) v = (v + epsilon) / denom;
  return Distribution(std::move(out));
}

std::size_t argmax_choice(std::span<const double> probs) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < probs.size(); ++j) {
    if (probs[j] > probs[best]) best = j;
  }
  return best;
}

// ---------------------------------------------------------------------------

ForecastSet::ForecastSet(std::vector<std::string> instance_ids, std::vector<std::string> module_ids,
                         const std::vector<std::vector<Distribution>>& cells)
    : instance_ids_(std::move(instance_ids)), module_ids_(std::move(module_ids)) {
  const std::size_t m = instance_ids_.size();
  const std::size_t n = module_ids_.size();
  if (cells.size() != m) throw ConsistencyError("forecast grid has wrong number of instances");
  if (n == 0) throw ConsistencyError("forecast set without modules");
  std::unordered_set<std::string> unique(module_ids_.begin(), module_ids_.end());
  if (unique.size() != n) throw ConsistencyError("duplicate module id in forecast set");

  k_ = m == 0 ? 0 : cells.front().empty() ? 0 : cells.front().front().size();
  values_.reserve(m * n * k_);
  for (std::size_t h = 0; h < m; ++h) {
    if (cells[h].size() != n) {
      throw ConsistencyError("instance " + instance_ids_[h] + ": forecast grid is incomplete");
    }
    for (const auto& d : cells[h]) {
      if (d.size() != k_) {
        throw ConsistencyError("instance " + instance_ids_[h] + ": forecast length mismatch");
      }
      values_.insert(values_.end(), d.begin(), d.end());
    }
  }
}

std::span<const double> ForecastSet::forecast(std::size_t h, std::size_t i) const {
  return std::span<const double>(values_).subspan((h * module_ids_.size() + i) * k_, k_);
}

std::span<const double> ForecastSet::block(std::size_t h) const {
  const std::size_t width = module_ids_.size() * k_;
  return std::span<const double>(values_).subspan(h * width, width);
}

Distribution ForecastSet::distribution(std::size_t h, std::size_t i) const {
  auto f = forecast(h, i);
  return Distribution(std::vector<double>(f.begin(), f.end()));
}

ForecastSet ForecastSet::smoothed(double epsilon) const {
  if (!(epsilon >= 0.0)) throw InvalidParameter("smoothing epsilon must be >= 0");
  ForecastSet out = *this;
  const double denom = 1.0 + static_cast<double>(k_) * epsilon;
  for (double& v : out.values_) v = (v + epsilon) / denom;
  return out;
}

ForecastSet ForecastSet::select_modules(std::span<const std::size_t> keep) const {
  ForecastSet out;
  out.instance_ids_ = instance_ids_;
  out.k_ = k_;
  for (std::size_t i : keep) out.module_ids_.push_back(module_ids_.at(i));
  out.values_.reserve(instances() * keep.size() * k_);
  for (std::size_t h = 0; h < instances(); ++h) {
    for (std::size_t i : keep) {
      auto f = forecast(h, i);
      out.values_.insert(out.values_.end(), f.begin(), f.end());
    }
  }
  return out;
}

ForecastSet ForecastSet::with_module(std::string module_id,
                                     const std::vector<Distribution>& column) const {
  if (column.size() != instances()) throw ConsistencyError("appended module column has wrong length");
  if (std::find(module_ids_.begin(), module_ids_.end(), module_id) != module_ids_.end()) {
    throw ConsistencyError("module id already present: " + module_id);
  }
  ForecastSet out;
  out.instance_ids_ = instance_ids_;
  out.module_ids_ = module_ids_;
  out.module_ids_.push_back(std::move(module_id));
  out.k_ = k_;
  out.values_.reserve(values_.size() + instances() * k_);
  for (std::size_t h = 0; h < instances(); ++h) {
    if (column[h].size() != k_) throw ConsistencyError("appended forecast length mismatch");
    auto b = block(h);
    out.values_.insert(out.values_.end(), b.begin(), b.end());
    out.values_.insert(out.values_.end(), column[h].begin(), column[h].end());
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::mixture: return "mixture";
    case Rule::logarithmic: return "logarithmic";
    case Rule::product: return "product";
  }
  return "?";
}

Rule parse_rule(std::string_view name) {
  if (name == "mixture") return Rule::mixture;
  if (name == "logarithmic" || name == "log") return Rule::logarithmic;
  if (name == "product") return Rule::product;
  throw ConfigError("unknown merging rule: " + std::string(name));
}

WeightBounds weight_bounds(Rule rule) {
  return rule == Rule::logarithmic ? WeightBounds{0.0, kLogWeightMax} : WeightBounds{0.0, 1.0};
}

WeightVector::WeightVector(Rule rule, std::vector<std::string> module_ids, std::vector<double> weights)
    : rule_(rule), module_ids_(std::move(module_ids)), weights_(std::move(weights)) {
  if (module_ids_.size() != weights_.size()) {
    throw InvalidParameter("weight vector: module ids and weights differ in length");
  }
  const auto box = weight_bounds(rule_);
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    double w = weights_[i];
    if (!std::isfinite(w) || w < box.low || w > box.high) {
      throw InvalidParameter("weight for " + module_ids_[i] + " outside [" + std::to_string(box.low) +
                             ", " + std::to_string(box.high) + "] for the " +
                             std::string(to_string(rule_)) + " rule");
    }
  }
}

WeightVector::WeightVector(Rule rule, std::vector<double> weights)
    : WeightVector(rule,
                   [&] {
                     std::vector<std::string> ids;
                     for (std::size_t i = 0; i < weights.size(); ++i) ids.push_back("m" + std::to_string(i));
                     return ids;
                   }(),
                   weights) {}

double WeightVector::weight_of(std::string_view module_id) const {
  auto it = std::find(module_ids_.begin(), module_ids_.end(), module_id);
  if (it == module_ids_.end()) throw ConfigError("no weight for module " + std::string(module_id));
  return weights_[static_cast<std::size_t>(it - module_ids_.begin())];
}

}  // namespace mcfuse
