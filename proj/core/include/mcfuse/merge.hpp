#pragma once

#include <span>
#include <vector>

#include "mcfuse/core.hpp"

namespace mcfuse {

/// Merged distributions for every instance of a ForecastSet.
struct MergedForecast {
  Rule rule = Rule::product;
  WeightVector weights;
  std::vector<Distribution> distributions;

  std::size_t size() const { return distributions.size(); }
};

// Each rule maps n module distributions (all length k) and n weights to one
// distribution. An all-zero weight vector yields uniform for every rule.

/// D_j proportional to sum_i w_i p_ij.
Distribution mixture_merge(std::span<const Distribution> forecasts, const WeightVector& w);

/// D_j proportional to prod_i p_ij^w_i, computed in log space. Throws
/// DomainError when a module with positive weight assigns zero probability.
Distribution logarithmic_merge(std::span<const Distribution> forecasts, const WeightVector& w);

/// D_j proportional to prod_i (w_i p_ij + (1 - w_i) / k).
Distribution product_merge(std::span<const Distribution> forecasts, const WeightVector& w);

/// Dispatches on `rule`; throws ConfigError if it differs from w.rule().
Distribution merge(Rule rule, std::span<const Distribution> forecasts, const WeightVector& w);

/// Merges every instance of `forecasts`. Weight ids must match the set's
/// module ids in order.
MergedForecast merge_all(const ForecastSet& forecasts, const WeightVector& w);

namespace detail {

/// Allocation-free kernel used by the optimizer. `block` is an n x k
/// row-major array, `out` receives k merged probabilities.
void merge_block(Rule rule, std::span<const double> block, std::size_t k,
                 std::span<const double> weights, std::span<double> out);

}  // namespace detail

}  // namespace mcfuse
