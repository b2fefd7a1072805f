#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcfuse/merge.hpp"
#include "support.hpp"

namespace mcfuse {
namespace {

void expect_probs(const Distribution& d, std::vector<double> want, double tol = 1e-12) {
  ASSERT_EQ(d.size(), want.size());
  for (std::size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(d[j], want[j], tol) << "entry " << j;
}

// Straight-line evaluation of each rule's formula, used as the oracle.
std::vector<double> oracle(Rule rule, const std::vector<Distribution>& p, const std::vector<double>& w) {
  const std::size_t k = p.front().size();
  std::vector<double> raw(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double v = rule == Rule::mixture ? 0.0 : 1.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (rule == Rule::mixture) v += w[i] * p[i][j];
      if (rule == Rule::logarithmic) v *= std::pow(p[i][j], w[i]);
      if (rule == Rule::product) v *= w[i] * p[i][j] + (1 - w[i]) / static_cast<double>(k);
    }
    raw[j] = v;
  }
  const double z = std::accumulate(raw.begin(), raw.end(), 0.0);
  for (auto& x : raw) x = z > 0 ? x / z : 1.0 / static_cast<double>(k);
  return raw;
}

double max_weight(Rule rule) { return weight_bounds(rule).high; }

TEST(MixtureMerge, Examples) {
  const Distribution p1({0.7, 0.1, 0.1, 0.1}), p2({0.1, 0.2, 0.3, 0.4});
  expect_probs(mixture_merge(std::vector{p1, p2}, WeightVector(Rule::mixture, {1, 0})), {0.7, 0.1, 0.1, 0.1});
  expect_probs(mixture_merge(std::vector{Distribution({1, 0, 0, 0}), Distribution({0, 1, 0, 0})},
                             WeightVector(Rule::mixture, {0.5, 0.5})),
               {0.5, 0.5, 0, 0});
  expect_probs(mixture_merge(std::vector{p1, p2}, WeightVector(Rule::mixture, {0, 0})), {0.25, 0.25, 0.25, 0.25});
}

TEST(LogarithmicMerge, Examples) {
  const Distribution p({0.4, 0.3, 0.2, 0.1});
  expect_probs(logarithmic_merge(std::vector{p}, WeightVector(Rule::logarithmic, {0})), {0.25, 0.25, 0.25, 0.25});
  expect_probs(logarithmic_merge(std::vector{p}, WeightVector(Rule::logarithmic, {1})), {0.4, 0.3, 0.2, 0.1});

  const auto smoothed = smooth(Distribution({1, 0, 0, 0}), 1e-5);
  const auto d = logarithmic_merge(std::vector{smoothed}, WeightVector(Rule::logarithmic, {0.2461}));
  EXPECT_NEAR(d[0], 0.85, 5e-4);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(d[j], 0.05, 2e-4);
}

TEST(LogarithmicMerge, ZeroProbabilityNeedsSmoothing) {
  const Distribution p({1, 0, 0, 0});
  EXPECT_THROW(logarithmic_merge(std::vector{p}, WeightVector(Rule::logarithmic, {0.5})), DomainError);
  expect_probs(logarithmic_merge(std::vector{p}, WeightVector(Rule::logarithmic, {0.0})), {0.25, 0.25, 0.25, 0.25});
}

TEST(LogarithmicMerge, NoUnderflowWithManyModules) {
  std::vector<Distribution> many(400, Distribution({1e-5, 1 - 1e-5}));
  const auto d = logarithmic_merge(many, WeightVector(Rule::logarithmic, std::vector<double>(400, 10.0)));
  EXPECT_NEAR(d[1], 1.0, 1e-12);
  EXPECT_GE(d[0], 0.0);
}

TEST(ProductMerge, Examples) {
  expect_probs(product_merge(std::vector{Distribution({1, 0, 0, 0})}, WeightVector(Rule::product, {0.8})),
               {0.85, 0.05, 0.05, 0.05});
  expect_probs(product_merge(std::vector{Distribution({0.9, 0.1, 0, 0})}, WeightVector(Rule::product, {0})),
               {0.25, 0.25, 0.25, 0.25});
  const auto d = product_merge(std::vector{Distribution({1, 0, 0, 0}), Distribution({0.5, 0.5, 0, 0})},
                               WeightVector(Rule::product, {0.8, 1.0}));
  expect_probs(d, {0.425 / 0.45, 0.025 / 0.45, 0, 0});
  EXPECT_NEAR(d[0], 0.9444444444444444, 1e-12);
}

TEST(ProductMerge, ConflictingCertaintiesFallBackToUniform) {
  const auto d = product_merge(std::vector{Distribution({1, 0}), Distribution({0, 1})},
                               WeightVector(Rule::product, {1, 1}));
  expect_probs(d, {0.5, 0.5});
}

TEST(Merge, DispatchAndMismatch) {
  const std::vector p{Distribution({0.6, 0.4}), Distribution({0.3, 0.7})};
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    const WeightVector w(r, {0.3, 0.9});
    const auto direct = r == Rule::mixture       ? mixture_merge(p, w)
                        : r == Rule::logarithmic ? logarithmic_merge(p, w)
                                                 : product_merge(p, w);
    EXPECT_EQ(merge(r, p, w), direct);
    EXPECT_THROW(merge(r == Rule::product ? Rule::mixture : Rule::product, p, w), ConfigError);
  }
}

TEST(Merge, MatchesFormulaOracle) {
  std::mt19937_64 rng(21);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    std::uniform_real_distribution<double> uw(0.0, max_weight(r));
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = 1 + trial % 4;
      const std::size_t k = 2 + trial % 4;
      std::vector<Distribution> p;
      std::vector<double> w;
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(test::random_distribution(rng, k, r != Rule::logarithmic));
        w.push_back(uw(rng));
      }
      const auto got = merge(r, p, WeightVector(r, w));
      const auto want = oracle(r, p, w);
      for (std::size_t j = 0; j < k; ++j) EXPECT_NEAR(got[j], want[j], 1e-12);
    }
  }
}

TEST(MergeProperties, ZeroWeightInvariance) {
  std::mt19937_64 rng(3);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    std::uniform_real_distribution<double> uw(0.01, max_weight(r));
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 2 + trial % 3;
      std::vector<Distribution> p;
      std::vector<double> w;
      for (std::size_t i = 0; i < n; ++i) {
        p.push_back(test::random_distribution(rng, 4, r != Rule::logarithmic));
        w.push_back(uw(rng));
      }
      const std::size_t drop = static_cast<std::size_t>(trial) % n;
      auto w_zero = w;
      w_zero[drop] = 0.0;
      auto p_less = p;
      auto w_less = w;
      p_less.erase(p_less.begin() + static_cast<std::ptrdiff_t>(drop));
      w_less.erase(w_less.begin() + static_cast<std::ptrdiff_t>(drop));
      const auto with_zero = merge(r, p, WeightVector(r, w_zero));
      const auto without = merge(r, p_less, WeightVector(r, w_less));
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(with_zero[j], without[j], 1e-12);
    }
  }
}

TEST(MergeProperties, ProductAndLogarithmicCoincideOnBinaryWeights) {
  std::mt19937_64 rng(8);
  std::bernoulli_distribution bit(0.5);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + trial % 5;
    std::vector<Distribution> p;
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back(test::random_distribution(rng, 5));
      w.push_back(bit(rng) ? 1.0 : 0.0);
    }
    const auto a = product_merge(p, WeightVector(Rule::product, w));
    const auto b = logarithmic_merge(p, WeightVector(Rule::logarithmic, w));
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(MergeProperties, MixtureScaleInvariance) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uw(0.05, 0.5);
  std::uniform_real_distribution<double> uc(0.1, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Distribution> p;
    std::vector<double> w;
    for (std::size_t i = 0; i < 3; ++i) {
      p.push_back(test::random_distribution(rng, 4, true));
      w.push_back(uw(rng));
    }
    const double c = uc(rng);
    auto scaled = w;
    for (auto& x : scaled) x *= c;
    const auto a = mixture_merge(p, WeightVector(Rule::mixture, w));
    const auto b = mixture_merge(p, WeightVector(Rule::mixture, scaled));
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(a[j], b[j], 1e-12);
  }
}

TEST(MergeProperties, PermutationEquivariance) {
  std::mt19937_64 rng(17);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    std::uniform_real_distribution<double> uw(0.0, max_weight(r));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<std::size_t> perm(4);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<Distribution> p;
      std::vector<Distribution> permuted;
      std::vector<double> w;
      for (std::size_t i = 0; i < 3; ++i) {
        p.push_back(test::random_distribution(rng, 4, r != Rule::logarithmic));
        std::vector<double> q(4);
        for (std::size_t j = 0; j < 4; ++j) q[j] = p.back()[perm[j]];
        permuted.push_back(normalize(q));
        w.push_back(uw(rng));
      }
      const auto a = merge(r, p, WeightVector(r, w));
      const auto b = merge(r, permuted, WeightVector(r, w));
      for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(b[j], a[perm[j]], 1e-12);
    }
  }
}

TEST(MergeProperties, OutputsAreDistributions) {
  std::mt19937_64 rng(29);
  for (Rule r : {Rule::mixture, Rule::logarithmic, Rule::product}) {
    std::uniform_real_distribution<double> uw(0.0, max_weight(r));
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<Distribution> p;
      std::vector<double> w;
      for (std::size_t i = 0; i < 4; ++i) {
        p.push_back(test::random_distribution(rng, 3, r != Rule::logarithmic));
        w.push_back(uw(rng));
      }
      const auto d = merge(r, p, WeightVector(r, w));
      double sum = 0.0;
      for (double x : d) {
        EXPECT_GE(x, 0.0);
        sum += x;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
    }
  }
}

TEST(MergeAll, PerInstanceAndModuleCheck) {
  std::mt19937_64 rng(2);
  const auto fs = test::random_forecasts(rng, 6, 2, 3);
  const WeightVector w(Rule::product, fs.module_ids(), {0.4, 0.9});
  const auto merged = merge_all(fs, w);
  ASSERT_EQ(merged.distributions.size(), 6u);
  EXPECT_EQ(merged.rule, Rule::product);
  for (std::size_t h = 0; h < 6; ++h) {
    const std::vector p{fs.distribution(h, 0), fs.distribution(h, 1)};
    EXPECT_EQ(merged.distributions[h], product_merge(p, w));
  }
  EXPECT_THROW(merge_all(fs, WeightVector(Rule::product, {"a", "b"}, {0.4, 0.9})), ConsistencyError);
}

}  // namespace
}  // namespace mcfuse
