#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "scengraph/cli.hpp"
#include "scengraph/errors.hpp"

namespace cli = scengraph::cli;

namespace {

void add_common_options(CLI::App* cmd, cli::RunConfig& config) {
  cmd->add_option("--out", config.out, "Output directory")
      ->envname("SCENGRAPH_OUT");
  cmd->add_option("--data", config.data_dir,
                  "Directory with lexicon/stopwords/operations tables")
      ->capture_default_str();
  cmd->add_option("--theta", config.theta,
                  "Coreference and match threshold in [0,1]")
      ->capture_default_str();
  cmd->add_option("--merge-threshold", config.merge_threshold,
                  "Layout merge threshold as a screen-size fraction")
      ->capture_default_str();
  cmd->add_option("--step-cap", config.step_cap,
                  "Hard cap on events per sub-scenario")
      ->capture_default_str();
  cmd->set_config("--config", "", "Read options from a config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "scengraph: build event knowledge graphs from GUI test-report "
      "bundles and drive scenario-based exploration of simulated apps"};
  app.require_subcommand(1);

  cli::RunConfig config;

  CLI::App* build = app.add_subcommand(
      "build-kg", "Construct a scenario graph from a report corpus");
  build->add_option("--corpus", config.corpus, "Report bundle directory")
      ->required();
  build->add_option("--scenario", config.scenario,
                    "Only ingest reports for this scenario");
  add_common_options(build, config);

  CLI::App* run = app.add_subcommand(
      "run", "Explore app models under graph guidance");
  run->add_option("--graph", config.graph, "Graph export file")->required();
  run->add_option("--app", config.apps, "App model file (repeatable)")
      ->required();
  run->add_option("--seeds", config.seeds, "Seed table file");
  run->add_option("--jobs", config.jobs, "Concurrent app runs")
      ->capture_default_str();
  run->add_flag("--invalid-inputs", config.invalid_inputs,
                "Use the invalid seed variants for input operations");
  add_common_options(run, config);

  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Score run outputs against golden operation files");
  eval_cmd->add_option("--app", config.apps, "App model file (repeatable)")
      ->required();
  eval_cmd->add_option("--scenario", config.scenario, "Scenario id")
      ->required();
  eval_cmd->add_option("--golden", config.golden_dir,
                       "Golden ScenOp root directory")
      ->required();
  eval_cmd
      ->add_option("--baseline-budget", config.baseline_budget,
                   "Random baseline event budget (0 disables)")
      ->capture_default_str();
  eval_cmd
      ->add_option("--baseline-seed", config.baseline_seed,
                   "Random baseline generator seed")
      ->capture_default_str();
  add_common_options(eval_cmd, config);

  CLI::App* fixgen = app.add_subcommand(
      "fixgen", "Materialize report bundles from scripts and app models");
  fixgen->add_option("--scripts", config.report_scripts,
                     "Report script directory")
      ->required();
  fixgen->add_option("--apps-dir", config.apps_dir, "App model directory")
      ->required();
  fixgen->add_option("--out", config.out, "Output corpus directory")
      ->envname("SCENGRAPH_OUT");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cli::cmd_build_kg(config);
    if (run->parsed()) return cli::cmd_run(config);
    if (eval_cmd->parsed()) return cli::cmd_eval(config);
    if (fixgen->parsed()) return cli::cmd_fixgen(config);
  } catch (const scengraph::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return cli::kExitInputError;
  } catch (const scengraph::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kExitInputError;
  }
  return cli::kExitOk;
}
