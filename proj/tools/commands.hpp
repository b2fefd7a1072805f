#pragma once

// The mcfuse subcommands as plain functions. main.cpp parses flags into
// these option structs; tests call the functions directly.

#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mcfuse/core.hpp"
#include "mcfuse/optimize.hpp"

namespace mcfuse::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitConsistency = 3;
inline constexpr int kExitNumeric = 4;

/// Environment variable naming the configuration file used when --config is absent.
inline constexpr const char* kConfigEnv = "MCFUSE_CONFIG";

/// InputError, ConfigError, InvalidParameter, InvalidScore -> 2;
/// ConsistencyError -> 3; DomainError and other numeric failures -> 4.
int exit_code_for(const std::exception& e);

/// --config if given, else $MCFUSE_CONFIG if set, else none.
std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& flag);

/// Optimizer flags given on the command line; unset fields keep the
/// configuration file's value or the library default.
struct OptimizerOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> fd_delta;
  std::optional<double> grad_clip;
  std::optional<double> step_size;
  std::optional<int> step_budget;
  std::optional<double> grad_norm_stop;
  std::optional<int> restarts;
  std::optional<double> smoothing_epsilon;
};

/// Defaults, then the config file's [optimizer] section, then overrides.
OptimizerParams resolve_optimizer_params(const std::optional<std::filesystem::path>& config,
                                         const OptimizerOverrides& overrides);

struct RunModulesOptions {
  std::filesystem::path questions;
  std::filesystem::path module_config;
  std::filesystem::path out_cache;
};
void run_modules(const RunModulesOptions& options, std::ostream& log);

struct TrainOptions {
  std::filesystem::path cache;
  std::filesystem::path questions;
  std::filesystem::path out_weights;
  Rule rule = Rule::product;
  std::optional<std::filesystem::path> config;
  OptimizerOverrides overrides;
};
void train(const TrainOptions& options, std::ostream& log);

struct EvalOptions {
  std::filesystem::path cache;
  std::filesystem::path questions;
  std::filesystem::path weights;
  std::optional<double> penalty;
  std::optional<double> threshold;
  std::optional<std::filesystem::path> report;
  std::optional<std::filesystem::path> config;
};
void eval(const EvalOptions& options, std::ostream& out);

struct SimulateOptions {
  std::size_t k = 4;
  std::vector<double> accuracies;
  std::size_t m = 1000;
  std::uint64_t seed = 1;
  std::string mode = "calibrated";
  bool exact_counts = false;
  std::filesystem::path out_questions;
  std::filesystem::path out_cache;
};
void simulate(const SimulateOptions& options, std::ostream& log);

struct PredictOptions {
  std::filesystem::path cache;
  std::filesystem::path questions;
  std::filesystem::path weights;
  std::optional<double> threshold;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> config;
};
void predict(const PredictOptions& options, std::ostream& out);

}  // namespace mcfuse::cli
