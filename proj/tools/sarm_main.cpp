// Command-line front end for the trajectory-mining HRL pipeline.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "sarm/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<double> minsup;
  std::optional<double> minconf;
  std::optional<int> episodes;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method;
};

void attach_common(CLI::App* cmd, CommonArgs& args, bool config_required) {
  auto* config =
      cmd->add_option("--config", args.config_path, "Experiment config file");
  if (config_required) config->required();
  cmd->add_option("--out", args.out_dir, "Artifact output directory");
  cmd->add_option("--minsup", args.minsup, "Minimum itemset support (0..1]");
  cmd->add_option("--minconf", args.minconf, "Minimum rule confidence (0..1]");
  cmd->add_option("--episodes", args.episodes, "Training episodes per run");
  cmd->add_option("--runs", args.runs, "Independent runs");
  cmd->add_option("--seed", args.seed, "Master RNG seed");
  cmd->add_option("--method", args.method, "flat, hier, or both")
      ->check(CLI::IsMember({"flat", "hier", "both"}));
}

sarm::ExperimentConfig load_config(const CommonArgs& args) {
  sarm::ExperimentConfig cfg = args.config_path.empty()
                                   ? sarm::ExperimentConfig{}
                                   : sarm::ExperimentConfig::from_file(
                                         args.config_path);
  if (args.minsup) cfg.minsup = *args.minsup;
  if (args.minconf) cfg.minconf = *args.minconf;
  if (args.episodes) cfg.episodes = *args.episodes;
  if (args.runs) cfg.runs = *args.runs;
  if (args.seed) cfg.seed = *args.seed;
  if (args.method) {
    cfg.method_flat = *args.method == "flat" || *args.method == "both";
    cfg.method_hier = *args.method == "hier" || *args.method == "both";
  }
  return cfg;
}

int report(const sarm::PipelineResult& result) {
  if (!result.ok()) {
    std::cerr << "error: stage " << sarm::to_string(result.failed_stage)
              << " failed: " << result.message << '\n';
    return 1;
  }
  std::cout << "ok: " << result.transactions.size() << " transactions, "
            << result.rules.size() << " rules, " << result.exits.size()
            << " exits, " << result.options.size() << " options\n";
  if (result.comparison) {
    std::cout << "flat vs hier (last-10% reward): t=" << result.comparison->t
              << " p=" << result.comparison->p << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subgoal mining and hierarchical reinforcement learning"};
  app.require_subcommand(1);

  CommonArgs args;
  auto* train = app.add_subcommand(
      "train", "Flat Q-learning only; writes curves and trajectories");
  auto* mine = app.add_subcommand(
      "mine", "Train, then mine frequent itemsets and sequential rules");
  auto* build_hst = app.add_subcommand(
      "build-hst", "Mine, then build the structure tree and task hierarchy");
  auto* run_hrl = app.add_subcommand(
      "run-hrl", "Full pipeline with hierarchical execution");
  auto* experiment = app.add_subcommand(
      "experiment", "Full pipeline plus flat-vs-hierarchical comparison");
  auto* golden = app.add_subcommand(
      "golden", "Run the built-in three-phase fixture end to end");
  for (auto* cmd : {train, mine, build_hst, run_hrl, experiment}) {
    attach_common(cmd, args, /*config_required=*/true);
  }
  attach_common(golden, args, /*config_required=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (golden->parsed()) {
      return report(sarm::run_golden(args.out_dir));
    }
    sarm::ExperimentConfig cfg = load_config(args);
    sarm::PipelineStage stop = sarm::PipelineStage::execution;
    if (train->parsed()) stop = sarm::PipelineStage::learning;
    if (mine->parsed()) stop = sarm::PipelineStage::mining;
    if (build_hst->parsed()) stop = sarm::PipelineStage::hst;
    if (run_hrl->parsed()) cfg.method_hier = true;
    return report(sarm::run_pipeline(cfg, args.out_dir, stop));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
