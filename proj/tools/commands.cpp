#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "mcfuse/evaluate.hpp"
#include "mcfuse/io.hpp"
#include "mcfuse/lexical/modules.hpp"
#include "mcfuse/merge.hpp"
#include "mcfuse/simulate.hpp"

namespace mcfuse::cli {

namespace {

double parse_number(const std::string& text, std::string_view key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
}

const KeyValueSection* find_section(const std::vector<KeyValueSection>& sections, std::string_view name) {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

struct EvalSettings {
  double penalty = kDefaultPenalty;
  double threshold = kDefaultThreshold;
};

// Penalty and threshold from [evaluate], then flags. A penalty without an
// explicit threshold moves the threshold to its expected-utility value.
EvalSettings resolve_eval_settings(const std::optional<std::filesystem::path>& config_flag,
                                   std::optional<double> penalty, std::optional<double> threshold) {
  if (const auto config = resolve_config_path(config_flag)) {
    const auto sections = read_key_value(*config);
    if (const auto* s = find_section(sections, "evaluate")) {
      if (!penalty) {
        if (auto v = s->get("penalty")) penalty = parse_number(*v, "penalty");
      }
      if (!threshold) {
        if (auto v = s->get("threshold")) threshold = parse_number(*v, "threshold");
      }
    }
  }
  EvalSettings out;
  if (penalty) {
    out.penalty = *penalty;
    out.threshold = expected_utility_threshold(*penalty);
  }
  if (threshold) out.threshold = *threshold;
  if (!(out.threshold >= 0.0 && out.threshold <= 1.0)) throw InvalidParameter("threshold must lie in [0, 1]");
  return out;
}

struct LoadedData {
  QuestionSet questions;
  ForecastSet forecasts;
  std::vector<std::size_t> answers;
};

LoadedData load_aligned(const std::filesystem::path& cache, const std::filesystem::path& questions_path,
                        std::ostream& log) {
  LoadedData data;
  data.questions = read_questions(questions_path);
  auto contents = read_forecast_cache(cache);
  if (contents.renormalized_rows > 0) {
    log << "note: renormalized " << contents.renormalized_rows << " cache rows\n";
  }
  data.forecasts = align_to_questions(contents.forecasts, data.questions);
  data.answers = data.questions.answers();
  return data;
}

// The weights file's modules must be the cache's, in the same order.
void check_modules(const WeightVector& w, const ForecastSet& forecasts) {
  if (w.module_ids() != forecasts.module_ids()) {
    std::string have;
    for (const auto& id : forecasts.module_ids()) have += (have.empty() ? "" : ",") + id;
    std::string want;
    for (const auto& id : w.module_ids()) want += (want.empty() ? "" : ",") + id;
    throw ConsistencyError("weights name modules [" + want + "], cache has [" + have + "]");
  }
}

double smoothing_from(const WeightsFile& file) {
  auto it = file.metadata.find("smoothing_epsilon");
  if (it == file.metadata.end()) return OptimizerParams{}.smoothing_epsilon;
  return parse_number(it->second, "smoothing_epsilon");
}

MergedForecast merge_for_weights(const WeightsFile& file, const ForecastSet& forecasts) {
  check_modules(file.weights, forecasts);
  const auto view = training_view(file.weights.rule(), forecasts, smoothing_from(file));
  return merge_all(view, file.weights);
}

std::string probs_json(std::span<const double> probs) {
  std::string out = "[";
  for (std::size_t j = 0; j < probs.size(); ++j) {
    if (j > 0) out += ',';
    out += format_double(probs[j]);
  }
  return out + "]";
}

nlohmann::json report_json(const ReportRow& row) {
  const auto& r = row.report;
  return {{"name", row.name},
          {"instances", r.instances},
          {"correct", r.correct},
          {"accuracy", r.accuracy},
          {"mean_likelihood", r.mean_likelihood},
          {"penalty_score", r.penalty_score},
          {"answered", r.answered},
          {"skipped", r.skipped},
          {"ci95_low", r.ci95.low},
          {"ci95_high", r.ci95.high}};
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConsistencyError*>(&e)) return kExitConsistency;
  if (dynamic_cast<const DomainError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const InvalidParameter*>(&e) || dynamic_cast<const InvalidScore*>(&e)) {
    return kExitInput;
  }
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitInput;
  return kExitNumeric;
}

std::optional<std::filesystem::path> resolve_config_path(const std::optional<std::filesystem::path>& flag) {
  if (flag) return flag;
  if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
    return std::filesystem::path(env);
  }
  return std::nullopt;
}

OptimizerParams resolve_optimizer_params(const std::optional<std::filesystem::path>& config,
                                         const OptimizerOverrides& o) {
  OptimizerParams params;
  if (const auto path = resolve_config_path(config)) {
    const auto sections = read_key_value(*path);
    if (const auto* s = find_section(sections, "optimizer")) {
      try {
        apply_optimizer_keys(*s, params);
      } catch (const InputError& e) {
        throw ConfigError(path->string() + ": " + e.what());
      }
    }
  }
  if (o.seed) params.seed = *o.seed;
  if (o.fd_delta) params.fd_delta = *o.fd_delta;
  if (o.grad_clip) params.grad_clip = *o.grad_clip;
  if (o.step_size) params.step_size = *o.step_size;
  if (o.step_budget) params.step_budget = *o.step_budget;
  if (o.grad_norm_stop) params.grad_norm_stop = *o.grad_norm_stop;
  if (o.restarts) params.restarts = *o.restarts;
  if (o.smoothing_epsilon) params.smoothing_epsilon = *o.smoothing_epsilon;
  params.validate();
  return params;
}

// ---------------------------------------------------------------------------

void run_modules(const RunModulesOptions& options, std::ostream& log) {
  const auto questions = read_questions(options.questions);
  const auto modules = lexical::load_modules(options.module_config);

  std::vector<std::string> module_ids;
  std::vector<std::vector<Distribution>> columns;
  for (const auto& module : modules) {
    module_ids.push_back(module->id());
    columns.push_back(lexical::run_module(*module, questions));
    log << "module " << module->id() << " (" << module->kind() << "): " << questions.size() << " instances\n";
  }
  std::vector<std::vector<Distribution>> cells(questions.size());
  for (std::size_t h = 0; h < questions.size(); ++h) {
    for (auto& column : columns) cells[h].push_back(column[h]);
  }
  write_forecast_cache(options.out_cache, ForecastSet(questions.ids(), std::move(module_ids), cells));
  log << "wrote " << questions.size() * modules.size() << " records to " << options.out_cache.string() << '\n';
}

void train(const TrainOptions& options, std::ostream& log) {
  const auto params = resolve_optimizer_params(options.config, options.overrides);
  const auto data = load_aligned(options.cache, options.questions, log);

  const auto report = optimize(options.rule, data.forecasts, data.answers, params);
  for (std::size_t r = 0; r < report.restarts.size(); ++r) {
    const auto& trace = report.restarts[r];
    log << "restart " << r << ": log-likelihood " << format_double(trace.log_likelihood) << " (" << trace.steps
        << " steps" << (trace.converged ? ", converged" : "") << ")\n";
  }
  log << "best restart " << report.best_restart << ": log-likelihood " << format_double(report.log_likelihood)
      << ", mean likelihood " << format_double(report.mean_likelihood) << '\n';

  WeightsFile file;
  file.weights = report.best_weights;
  for (std::size_t i = 0; i < data.forecasts.modules(); ++i) {
    const std::size_t keep[] = {i};
    const auto single = optimize(Rule::product, data.forecasts.select_modules(keep), data.answers, params);
    file.single_weights.emplace_back(data.forecasts.module_ids()[i], single.best_weights[0]);
  }
  auto& meta = file.metadata;
  meta["seed"] = std::to_string(params.seed);
  meta["fd_delta"] = format_double(params.fd_delta);
  meta["grad_clip"] = format_double(params.grad_clip);
  meta["step_size"] = format_double(params.step_size);
  meta["step_budget"] = std::to_string(params.step_budget);
  meta["grad_norm_stop"] = format_double(params.grad_norm_stop);
  meta["restarts"] = std::to_string(params.restarts);
  meta["smoothing_epsilon"] = format_double(params.smoothing_epsilon);
  meta["log_likelihood"] = format_double(report.log_likelihood);
  meta["mean_likelihood"] = format_double(report.mean_likelihood);
  meta["instances"] = std::to_string(data.questions.size());
  meta["question_digest"] = question_digest(data.questions);
  write_weights(options.out_weights, file);

  for (std::size_t i = 0; i < file.weights.size(); ++i) {
    log << "weight " << file.weights.module_ids()[i] << " = " << format_double(file.weights[i]) << '\n';
  }
}

void eval(const EvalOptions& options, std::ostream& out) {
  const auto settings = resolve_eval_settings(options.config, options.penalty, options.threshold);
  const auto data = load_aligned(options.cache, options.questions, std::cerr);
  const auto file = read_weights(options.weights);
  const EvaluationOptions eval_options{settings.penalty, settings.threshold, 0.95};

  std::vector<ReportRow> rows;
  const auto merged = merge_for_weights(file, data.forecasts);
  rows.push_back({"merged:" + std::string(to_string(file.weights.rule())), evaluate(merged, data.answers, eval_options)});

  for (std::size_t i = 0; i < data.forecasts.modules(); ++i) {
    const auto& id = data.forecasts.module_ids()[i];
    double w = 1.0;
    for (const auto& [single_id, value] : file.single_weights) {
      if (single_id == id) w = value;
    }
    const std::size_t keep[] = {i};
    const auto column = data.forecasts.select_modules(keep);
    const auto single = merge_all(column, WeightVector(Rule::product, {id}, {w}));
    rows.push_back({id, evaluate(single, data.answers, eval_options)});
  }

  write_table(out, rows);

  if (options.report) {
    nlohmann::json doc;
    doc["rule"] = std::string(to_string(file.weights.rule()));
    doc["penalty"] = settings.penalty;
    doc["threshold"] = settings.threshold;
    doc["question_digest"] = question_digest(data.questions);
    doc["rows"] = nlohmann::json::array();
    for (const auto& row : rows) doc["rows"].push_back(report_json(row));
    write_file_atomic(*options.report, doc.dump(2) + "\n");
  }
}

void simulate(const SimulateOptions& options, std::ostream& log) {
  GenerativeSpec spec;
  spec.k = options.k;
  spec.module_accuracies = options.accuracies;
  spec.m = options.m;
  spec.seed = options.seed;
  spec.mode = parse_generator_mode(options.mode);
  spec.exact_counts = options.exact_counts;
  const auto ds = gen_calibrated_independent(spec);
  write_questions(options.out_questions, ds.questions());
  write_forecast_cache(options.out_cache, ds.forecasts);
  log << "seed " << spec.seed << ": " << spec.m << " instances, " << spec.module_accuracies.size() << " modules, k="
      << spec.k << ", mode " << to_string(spec.mode) << (spec.exact_counts ? ", exact counts" : "") << '\n';
}

void predict(const PredictOptions& options, std::ostream& out) {
  const auto settings = resolve_eval_settings(options.config, std::nullopt, options.threshold);
  const auto data = load_aligned(options.cache, options.questions, std::cerr);
  const auto file = read_weights(options.weights);
  const auto merged = merge_for_weights(file, data.forecasts);

  std::ostringstream lines;
  for (std::size_t h = 0; h < merged.distributions.size(); ++h) {
    const auto& d = merged.distributions[h];
    const std::size_t choice = argmax_choice(d);
    const bool skip = !(d[choice] > settings.threshold);
    lines << "{\"id\":" << nlohmann::json(data.questions[h].id).dump() << ",\"choice\":" << choice
          << ",\"probs\":" << probs_json(d.probs()) << ",\"skip\":" << (skip ? "true" : "false") << "}\n";
  }
  if (options.out) {
    write_file_atomic(*options.out, lines.str());
  } else {
    out << lines.str();
  }
}

}  // namespace mcfuse::cli
