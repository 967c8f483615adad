#pragma once

#include <functional>

#include "sarm/hst.hpp"
#include "sarm/qlearn.hpp"

namespace sarm {

// Local policy of one subtask: a Q table over its region and primitive
// actions, terminating when one of the subtask's exits is executed.
struct OptionPolicy {
  int subtask_id = -1;
  QTable q;
  std::vector<StateId> region;  // sorted
  std::vector<Exit> exits;
  double confidence = 0.0;  // rule confidence, used as a priority score

  bool admissible(StateId s) const {
    return std::binary_search(region.begin(), region.end(), s);
  }
  bool is_exit(StateId s, Action a) const;
};

struct OptionLearnResult {
  OptionPolicy policy;
  std::vector<StateId> unreachable;  // region states that cannot reach an exit
};

/// Q-learning confined to the subtask's region; executing an exit pair pays
/// an internal terminal bonus of the environment's goal reward magnitude.
OptionLearnResult learn_option(const Env& env, const Subtask& subtask,
                               const LearnerParams& params);

// Abstract action-value table: primitive columns first, one column per
// option after them. An option column is admissible only inside its region.
struct AbstractQ {
  QTable q;
  int primitives = 0;
  int options = 0;

  Action option_column(int option_index) const {
    return primitives + option_index;
  }
};

struct OptionExecution {
  StateId end_state = 0;
  double discounted_reward = 0.0;
  int steps = 0;
  bool env_terminal = false;
  bool interrupted = false;  // left the region without firing an exit
};

/// Runs an option greedily from `s` until an exit fires, the region is
/// left, the env terminates, or `max_steps` elapse.
OptionExecution execute_option(const Env& env, const OptionPolicy& option,
                               StateId s, double gamma, Rng& rng, int max_steps,
                               std::vector<StateId>* visited = nullptr,
                               EpisodeRecord* record = nullptr);

/// SMDP Q-learning over primitives plus the given options. With no options
/// this is exactly flat Q-learning (same seed, same tables).
AbstractQ smdp_train(const Env& env, const std::vector<OptionPolicy>& options,
                     const LearnerParams& params,
                     std::vector<EpisodeRecord>* episodes = nullptr);

/// Decomposed value recursion: V(T,s) = max_a [V(child(a),s) + Q_T(s,a)],
/// bottoming out at leaf subtasks (max over primitive Q). `task_q` supplies
/// Q_T(s,a) where actions are the task's children followed by primitives.
/// Throws std::logic_error on a cycle.
double decomposed_value(
    const TaskHierarchy& hierarchy,
    const std::function<double(int task, StateId s, int action)>& task_q,
    int primitive_actions, int task, StateId s);

}  // namespace sarm
