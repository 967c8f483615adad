#pragma once

#include <string>
#include <vector>

#include "sarm/env.hpp"
#include "sarm/grid.hpp"

namespace sarm {

// Admissible subgoal-label orders that advance progress. Chain mode has a
// single order; tree mode lists every root-to-goal order of the label tree.
struct ProgressSpec {
  enum class Mode { chain, tree };
  Mode mode = Mode::chain;
  std::vector<std::vector<char>> admissible_orders;

  static ProgressSpec chain(std::vector<char> order);
  static ProgressSpec tree(std::vector<std::vector<char>> orders);

  int levels() const;
  /// True when pressing `label` at progress `level` advances to level+1.
  bool advances(int level, char label) const;
};

// Gridworld with press-key semantics: the agent must press the subgoal keys
// in an admissible order, then press at the goal cell to finish (+10).
// `goal_only` drops the press action and pays +10 on entering the goal.
class KeyMaze final : public Env {
 public:
  enum class RewardScheme { key_press, goal_only };

  static constexpr Action kUp = 0;
  static constexpr Action kRight = 1;
  static constexpr Action kDown = 2;
  static constexpr Action kLeft = 3;
  static constexpr Action kPress = 4;

  KeyMaze(GridMap map, ProgressSpec progress, Cell start, Cell goal,
          double slip = 0.2, RewardScheme scheme = RewardScheme::key_press);

  StateId state_count() const override;
  int action_count() const override;
  std::vector<std::pair<StateId, double>> transition_distribution(
      StateId s, Action a) const override;
  double reward(StateId s, Action a, StateId next) const override;
  bool terminal(StateId s, Action a, StateId next) const override;
  StateId initial_state(Rng& rng) const override;
  double goal_reward() const override { return 10.0; }

  // State ids are cell_index + cell_count * progress, 1-based, so that a
  // progress slice occupies one contiguous block of ids.
  StateId encode_state(Cell c, int progress) const;
  std::pair<Cell, int> decode_state(StateId s) const;

  const GridMap& map() const { return map_; }
  const ProgressSpec& progress() const { return progress_; }
  Cell goal() const { return goal_; }
  Cell start() const { return start_; }
  int levels() const { return progress_.levels(); }

 private:
  Cell move_target(Cell c, Action a) const;

  GridMap map_;
  ProgressSpec progress_;
  Cell start_;
  Cell goal_;
  double slip_;
  RewardScheme scheme_;
};

}  // namespace sarm
