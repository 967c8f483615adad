#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "sarm/hrl.hpp"
#include "sarm/key_maze.hpp"
#include "sarm/stats.hpp"
#include "sarm/taxi.hpp"

namespace sarm {

// Flat key=value experiment description (see docs in README).
struct ExperimentConfig {
  std::string env = "key_maze";  // key_maze | goal_maze | taxi
  std::string map_text;          // ASCII map for the maze environments
  std::vector<std::vector<char>> orders;  // admissible subgoal orders

  double minsup = 0.9;
  double minconf = 0.9;
  int runs = 4;
  int episodes = 1000;
  int hrl_episodes = 0;  // 0: same as episodes
  int option_episodes = 2000;
  int max_steps = 400;
  int top_k = 5;
  int cluster_window = 0;
  std::uint64_t seed = 0;
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  double slip = 0.2;
  int taxi_scale = 1;
  bool method_flat = true;
  bool method_hier = true;

  static ExperimentConfig from_text(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

enum class PipelineStage { ok, learning, mining, hst, options, execution };
std::string to_string(PipelineStage stage);

struct RunCurve {
  std::vector<int> steps;       // per episode
  std::vector<double> rewards;  // per episode
};

struct PipelineResult {
  PipelineStage failed_stage = PipelineStage::ok;
  std::string message;
  std::size_t skipped_trajectories = 0;

  std::vector<StateActionTrajectory> mined;
  std::vector<Transaction> transactions;
  std::vector<FrequentItemset> frequents;
  std::vector<StateId> subgoals;  // frequent singletons, ascending
  std::vector<SequentialRule> rules;
  std::vector<Exit> exits;
  std::shared_ptr<HSTNode> hst;
  std::optional<TaskHierarchy> hierarchy;
  std::vector<OptionPolicy> options;

  std::vector<RunCurve> flat_curves;
  std::vector<RunCurve> hier_curves;
  std::optional<WelchResult> comparison;  // last-10% rewards, flat vs hier

  bool ok() const { return failed_stage == PipelineStage::ok; }
};

/// Full experiment: train, mine, build, execute. Deterministic per seed.
/// Writes all artifacts under out_dir unless it is empty. `stop_after`
/// truncates the pipeline: learning (train only), mining (plus rule
/// mining), hst (plus hierarchy construction), execution (everything).
PipelineResult run_pipeline(const ExperimentConfig& config,
                            const std::filesystem::path& out_dir = {},
                            PipelineStage stop_after = PipelineStage::execution);

// Visit-frequency matrix over grid cells (Fig. 3 style output).
struct VisitMatrix {
  int width = 0;
  int height = 0;
  std::vector<std::uint64_t> counts;  // row-major

  std::uint64_t at(int x, int y) const { return counts[y * width + x]; }
  std::uint64_t total() const;
  std::string to_csv() const;
  std::string to_pgm() const;  // P2, brightest = most visited
};

/// Counts every state visit, projected to a grid cell.
VisitMatrix emit_visit_matrix(const std::vector<std::vector<StateId>>& trajs,
                              int width, int height,
                              const std::function<Cell(StateId)>& cell_of);

// ---- Golden three-phase fixture (4x5 cells, 3 phases, 60 states) ----

/// The six canonical transactions of the three-phase maze.
std::vector<std::vector<StateId>> golden_trajectories();

/// The matching environment: open 4x5 grid, phase keys at s7 and s34,
/// state ids cell + 20 * phase.
KeyMaze golden_env();

/// Reconstructs actions from a state sequence of the three-phase maze:
/// +cells is the phase key press, grid steps are movements.
StateActionTrajectory infer_actions(const std::vector<StateId>& states,
                                    const KeyMaze& env);

/// Mines, builds and checks the golden fixture end to end.
PipelineResult run_golden(const std::filesystem::path& out_dir = {});

}  // namespace sarm
