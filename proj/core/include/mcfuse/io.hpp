#pragma once

// File formats shared by the library and the command-line tool. Every
// writer is deterministic and writes atomically; every reader re-ingests
// its writer's output to an equal value.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/optimize.hpp"

namespace mcfuse {

/// Decimal with 17 significant digits, enough to round-trip any double.
std::string format_double(double value);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// ---------------------------------------------------------------------------
// Questions: one JSON object per line,
//   {"id":"q1","stem":["hidden"],"choices":[["laughable"],["veiled"]],"answer":1}

QuestionSet read_questions(const std::filesystem::path& path);
std::string serialize_questions(const QuestionSet& questions);
void write_questions(const std::filesystem::path& path, const QuestionSet& questions);

/// FNV-1a 64 of the canonical serialization, as 16 hex digits.
std::string question_digest(const QuestionSet& questions);

// ---------------------------------------------------------------------------
// Forecast cache: one JSON object per (instance, module),
//   {"instance":"q1","module":"lsa","probs":[0.25,0.25,0.25,0.25]}

struct CacheContents {
  ForecastSet forecasts;
  /// Rows whose sum was off by more than kSumTolerance and were rescaled.
  std::size_t renormalized_rows = 0;
};

/// Rejects partial grids, duplicate records and negative probabilities.
CacheContents read_forecast_cache(const std::filesystem::path& path);
std::string serialize_forecast_cache(const ForecastSet& forecasts);
void write_forecast_cache(const std::filesystem::path& path, const ForecastSet& forecasts);

/// The cache reordered to the question set's instance order. Throws
/// ConsistencyError on missing or extra instances or a different k.
ForecastSet align_to_questions(const ForecastSet& forecasts, const QuestionSet& questions);

// ---------------------------------------------------------------------------
// Key-value files: "key = value" lines, optional "[section name]" headers,
// '#' comments.

struct KeyValueSection {
  std::string name;  ///< empty for keys before the first header
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t line = 0;

  std::optional<std::string> get(std::string_view key) const;
};

std::vector<KeyValueSection> read_key_value(const std::filesystem::path& path);

/// Applies recognised optimizer keys (fd_delta, grad_clip, step_size,
/// step_budget, grad_norm_stop, restarts, seed, smoothing_epsilon).
void apply_optimizer_keys(const KeyValueSection& section, OptimizerParams& params);

// ---------------------------------------------------------------------------
// Weights file (key-value):
//   rule = product
//   weight.<module> = <value>          one per module, in module order
//   single.<module> = <value>          optional individual product weights
//   <metadata key> = <value>           seed, optimizer constants, likelihoods, digest

struct WeightsFile {
  WeightVector weights;
  std::vector<std::pair<std::string, double>> single_weights;
  std::map<std::string, std::string> metadata;
};

WeightsFile read_weights(const std::filesystem::path& path);
std::string serialize_weights(const WeightsFile& file);
void write_weights(const std::filesystem::path& path, const WeightsFile& file);

}  // namespace mcfuse
