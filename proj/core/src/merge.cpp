#include "mcfuse/merge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mcfuse {

namespace detail {

namespace {

void fill_uniform(std::span<double> out) {
  std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
}

// Exponentiates max-shifted log scores in place and normalizes. A row of
// all -inf (every choice ruled out) falls back to uniform.
void normalize_log_scores(std::span<double> out) {
  const double top = *std::max_element(out.begin(), out.end());
  if (top == -std::numeric_limits<double>::infinity()) {
    fill_uniform(out);
    return;
  }
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - top);
    sum += v;
  }
  for (double& v : out) v /= sum;
}

void mixture(std::span<const double> block, std::size_t k, std::span<const double> w,
             std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    auto p = block.subspan(i * k, k);
    for (std::size_t j = 0; j < k; ++j) {
      out[j] += w[i] * p[j];
      total += w[i] * p[j];
    }
  }
  if (total <= 0.0) {
    fill_uniform(out);
    return;
  }
  for (double& v : out) v /= total;
}

void logarithmic(std::span<const double> block, std::size_t k, std::span<const double> w,
                 std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    auto p = block.subspan(i * k, k);
    for (std::size_t j = 0; j < k; ++j) {
      if (p[j] <= 0.0) {
        throw DomainError("logarithmic rule: module " + std::to_string(i) +
                          " assigns zero probability to choice " + std::to_string(j) +
                          "; smooth forecasts before merging");
      }
      out[j] += w[i] * std::log(p[j]);
    }
  }
  normalize_log_scores(out);
}

void product(std::span<const double> block, std::size_t k, std::span<const double> w,
             std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const double inv_k = 1.0 / static_cast<double>(k);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    auto p = block.subspan(i * k, k);
    for (std::size_t j = 0; j < k; ++j) {
      const double factor = w[i] * p[j] + (1.0 - w[i]) * inv_k;
      out[j] += factor > 0.0 ? std::log(factor) : -std::numeric_limits<double>::infinity();
    }
  }
  normalize_log_scores(out);
}

}  // namespace

void merge_block(Rule rule, std::span<const double> block, std::size_t k,
                 std::span<const double> weights, std::span<double> out) {
  switch (rule) {
    case Rule::mixture: mixture(block, k, weights, out); return;
    case Rule::logarithmic: logarithmic(block, k, weights, out); return;
    case Rule::product: product(block, k, weights, out); return;
  }
}

}  // namespace detail

namespace {

Distribution merge_checked(Rule rule, std::span<const Distribution> forecasts, const WeightVector& w) {
  if (w.rule() != rule) {
    throw ConfigError("weights were trained for the " + std::string(to_string(w.rule())) +
                      " rule, not " + std::string(to_string(rule)));
  }
  if (forecasts.empty()) throw InvalidParameter("merge needs at least one module forecast");
  if (forecasts.size() != w.size()) throw InvalidParameter("one weight per module forecast required");
  const std::size_t k = forecasts.front().size();
  std::vector<double> block;
  block.reserve(forecasts.size() * k);
  for (const auto& d : forecasts) {
    if (d.size() != k) throw InvalidParameter("module forecasts differ in length");
    block.insert(block.end(), d.begin(), d.end());
  }
  std::vector<double> out(k);
  detail::merge_block(rule, block, k, w.values(), out);
  return Distribution(std::move(out));
}

}  // namespace

Distribution mixture_merge(std::span<const Distribution> forecasts, const WeightVector& w) {
  return merge_checked(Rule::mixture, forecasts, w);
}

Distribution logarithmic_merge(std::span<const Distribution> forecasts, const WeightVector& w) {
  return merge_checked(Rule::logarithmic, forecasts, w);
}

Distribution product_merge(std::span<const Distribution> forecasts, const WeightVector& w) {
  return merge_checked(Rule::product, forecasts, w);
}

Distribution merge(Rule rule, std::span<const Distribution> forecasts, const WeightVector& w) {
  return merge_checked(rule, forecasts, w);
}

MergedForecast merge_all(const ForecastSet& forecasts, const WeightVector& w) {
  if (w.module_ids() != forecasts.module_ids()) {
    throw ConsistencyError("weight vector modules do not match the forecast set's modules");
  }
  MergedForecast merged{w.rule(), w, {}};
  merged.distributions.reserve(forecasts.instances());
  std::vector<double> out(forecasts.choices());
  for (std::size_t h = 0; h < forecasts.instances(); ++h) {
    detail::merge_block(w.rule(), forecasts.block(h), forecasts.choices(), w.values(), out);
    merged.distributions.emplace_back(out);
  }
  return merged;
}

}  // namespace mcfuse
