#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using mcfuse::cli::OptimizerOverrides;

void add_optimizer_flags(CLI::App* cmd, OptimizerOverrides& o) {
  cmd->add_option("--seed", o.seed, "Random seed for restart starting points");
  cmd->add_option("--fd-delta", o.fd_delta, "Finite-difference half-step");
  cmd->add_option("--grad-clip", o.grad_clip, "Per-component truncation of the ascent direction");
  cmd->add_option("--step-size", o.step_size, "Largest per-component move of one step");
  cmd->add_option("--step-budget", o.step_budget, "Gradient evaluations per hillclimb");
  cmd->add_option("--grad-norm-stop", o.grad_norm_stop, "Stop below this projected gradient norm");
  cmd->add_option("--restarts", o.restarts, "Number of random restarts");
  cmd->add_option("--smoothing-epsilon", o.smoothing_epsilon, "Smoothing for mixture and logarithmic training");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = mcfuse::cli;
  CLI::App app{"mcfuse: merge, train and evaluate multiple-choice solver forecasts"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::filesystem::path> config;
  app.add_option("--config", config, "Configuration file (default: $MCFUSE_CONFIG)");

  cli::RunModulesOptions run_opts;
  auto* run_cmd = app.add_subcommand("run-modules", "Score a question set with configured modules");
  run_cmd->add_option("questions", run_opts.questions, "Question file")->required();
  run_cmd->add_option("modules", run_opts.module_config, "Module configuration file")->required();
  run_cmd->add_option("-o,--out", run_opts.out_cache, "Forecast cache to write")->required();

  cli::TrainOptions train_opts;
  std::string train_rule = "product";
  auto* train_cmd = app.add_subcommand("train", "Fit merging-rule weights by maximum likelihood");
  train_cmd->add_option("cache", train_opts.cache, "Forecast cache")->required();
  train_cmd->add_option("questions", train_opts.questions, "Question file")->required();
  train_cmd->add_option("--rule", train_rule, "mixture, logarithmic or product")->capture_default_str();
  train_cmd->add_option("-o,--out", train_opts.out_weights, "Weights file to write")->required();
  add_optimizer_flags(train_cmd, train_opts.overrides);

  cli::EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "Report accuracy, mean likelihood, penalty score and intervals");
  eval_cmd->add_option("cache", eval_opts.cache, "Forecast cache")->required();
  eval_cmd->add_option("questions", eval_opts.questions, "Question file")->required();
  eval_cmd->add_option("weights", eval_opts.weights, "Weights file")->required();
  eval_cmd->add_option("--penalty", eval_opts.penalty, "Points lost per wrong answer");
  eval_cmd->add_option("--threshold", eval_opts.threshold, "Answer only above this top probability");
  eval_cmd->add_option("--report", eval_opts.report, "Also write a JSON report here");

  cli::SimulateOptions sim_opts;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic questions and forecasts");
  sim_cmd->add_option("--k", sim_opts.k, "Choices per question")->capture_default_str();
  sim_cmd->add_option("--acc", sim_opts.accuracies, "Module accuracies")->required()->delimiter(',');
  sim_cmd->add_option("--m", sim_opts.m, "Number of instances")->capture_default_str();
  sim_cmd->add_option("--seed", sim_opts.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--mode", sim_opts.mode, "calibrated or one-hot")->capture_default_str();
  sim_cmd->add_flag("--exact-counts", sim_opts.exact_counts, "Each module right on exactly round(a*m) instances");
  sim_cmd->add_option("--questions", sim_opts.out_questions, "Question file to write")->required();
  sim_cmd->add_option("--cache", sim_opts.out_cache, "Forecast cache to write")->required();

  cli::PredictOptions pred_opts;
  auto* pred_cmd = app.add_subcommand("predict", "Merged answer, distribution and skip flag per instance");
  pred_cmd->add_option("cache", pred_opts.cache, "Forecast cache")->required();
  pred_cmd->add_option("questions", pred_opts.questions, "Question file")->required();
  pred_cmd->add_option("weights", pred_opts.weights, "Weights file")->required();
  pred_cmd->add_option("--threshold", pred_opts.threshold, "Skip at or below this top probability");
  pred_cmd->add_option("-o,--out", pred_opts.out, "Write predictions here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitOk : cli::kExitInput;
  }

  try {
    if (*run_cmd) {
      cli::run_modules(run_opts, std::cout);
    } else if (*train_cmd) {
      train_opts.rule = mcfuse::parse_rule(train_rule);
      train_opts.config = config;
      cli::train(train_opts, std::cout);
    } else if (*eval_cmd) {
      eval_opts.config = config;
      cli::eval(eval_opts, std::cout);
    } else if (*sim_cmd) {
      cli::simulate(sim_opts, std::cout);
    } else if (*pred_cmd) {
      pred_opts.config = config;
      cli::predict(pred_opts, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "mcfuse: " << e.what() << '\n';
    return cli::exit_code_for(e);
  }
  return cli::kExitOk;
}
