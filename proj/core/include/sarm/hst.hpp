#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sarm/env.hpp"
#include "sarm/miner.hpp"

namespace sarm {

// Node of the hierarchical structure tree. Rules are inserted
// consequent-first, so depth order is reverse visitation order.
struct HSTNode {
  std::optional<StateId> subgoal;  // absent at the root
  double confidence = 0.0;         // max confidence of rules through here
  bool rule_terminal = false;      // some rule ends at this node
  std::vector<std::unique_ptr<HSTNode>> children;

  HSTNode* find_child(StateId item);
  const HSTNode* find_child(StateId item) const;
};

/// Inserts a rule as a root-anchored path, last item first; creates a child
/// at the first mismatch. Idempotent for repeated rules.
void hst_insert(HSTNode& root, const SequentialRule& rule);

/// Builds the tree from rules in canonical order (confidence desc, support
/// desc, then item sequence).
std::unique_ptr<HSTNode> hst_construct(std::vector<SequentialRule> rules);

std::size_t hst_node_count(const HSTNode& root);  // excludes the root
bool hst_equal(const HSTNode& a, const HSTNode& b);
std::string hst_render(const HSTNode& root);  // indented tree

struct Exit {
  StateId state = 0;
  Action action = 0;
  friend bool operator==(const Exit&, const Exit&) = default;
};

struct StateActionTrajectory {
  std::vector<StateId> states;
  std::vector<Action> actions;  // size == states.size() - 1
};

/// Per subgoal, the action taken at its first visit (majority across
/// trajectories, ties by lowest action id). Subgoals reached from another
/// subgoal by a single action are collapsed into the predecessor's exit.
std::vector<Exit> extract_exits(const std::vector<StateId>& subgoals,
                                const std::vector<StateActionTrajectory>& trajs);

/// Groups subgoals whose first-occurrence times lie within `window` steps
/// in a majority of their shared trajectories. Representative first.
std::vector<std::vector<StateId>> cluster_adjacent_subgoals(
    const std::vector<StateId>& subgoals,
    const std::vector<std::vector<StateId>>& trajs, int window);

// Semi-MDP subtask over one region: admissible states, exits, children.
struct Subtask {
  int id = 0;
  std::vector<std::size_t> changing_variables;  // X_i
  std::vector<StateId> states;                  // S_i, sorted
  std::vector<Exit> exits;                      // G_i
  std::vector<int> children;                    // C_i
  std::optional<StateId> subgoal;

  bool contains(StateId s) const;
};

struct TaskHierarchy {
  std::vector<Subtask> subtasks;  // indexed by id
  int root_id = -1;

  const Subtask& root() const { return subtasks.at(root_id); }
  /// Subtask whose region contains s, or -1.
  int region_of(StateId s) const;
};

/// Partitions the state space into regions between consecutive exits.
/// With an env, regions are closed under non-exit transitions; otherwise
/// only trajectory-visited states are assigned. `spec` (optional) supplies
/// the factored decode for X_i; MDPs get the single synthetic variable.
TaskHierarchy build_hierarchy(const std::vector<Exit>& exits,
                              const std::vector<StateActionTrajectory>& trajs,
                              const Env* env = nullptr,
                              const DomainSpec* spec = nullptr);

struct ConsistencyReport {
  bool consistent = true;
  int segment = -1;
  std::string reason;
};

/// Checks that the trajectory segments exactly along the hierarchy's
/// regions and exits.
ConsistencyReport check_consistency(const TaskHierarchy& hierarchy,
                                    const StateActionTrajectory& traj);

/// Plain-text indented rendering of the subtask tree.
std::string hierarchy_render(const TaskHierarchy& h);
/// Machine-readable adjacency: id|subgoal|exits|children per line.
std::string hierarchy_adjacency(const TaskHierarchy& h);

}  // namespace sarm
