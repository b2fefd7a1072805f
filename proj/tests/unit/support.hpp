#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mcfuse/core.hpp"

namespace mcfuse::test {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(MCFUSE_FIXTURE_DIR) / name;
}

/// A fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mcfuse_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Random distribution; entries are strictly positive unless allow_zero.
inline Distribution random_distribution(std::mt19937_64& rng, std::size_t k, bool allow_zero = false) {
  std::uniform_real_distribution<double> u(allow_zero ? 0.0 : 0.01, 1.0);
  std::bernoulli_distribution zero(0.3);
  std::vector<double> raw(k);
  for (auto& x : raw) x = (allow_zero && zero(rng)) ? 0.0 : u(rng);
  if (allow_zero) raw[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] += 0.5;
  double s = 0.0;
  for (double x : raw) s += x;
  for (auto& x : raw) x /= s;
  return normalize(raw);
}

/// Random forecast set with m instances, n modules, k choices.
inline ForecastSet random_forecasts(std::mt19937_64& rng, std::size_t m, std::size_t n, std::size_t k,
                                    bool allow_zero = false) {
  std::vector<std::string> ids;
  std::vector<std::string> modules;
  for (std::size_t h = 0; h < m; ++h) ids.push_back("i" + std::to_string(h));
  for (std::size_t i = 0; i < n; ++i) modules.push_back("m" + std::to_string(i));
  std::vector<std::vector<Distribution>> cells(m);
  for (auto& row : cells) {
    for (std::size_t i = 0; i < n; ++i) row.push_back(random_distribution(rng, k, allow_zero));
  }
  return ForecastSet(std::move(ids), std::move(modules), cells);
}

inline std::vector<std::size_t> random_answers(std::mt19937_64& rng, std::size_t m, std::size_t k) {
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::size_t> out(m);
  for (auto& a : out) a = pick(rng);
  return out;
}

}  // namespace mcfuse::test
