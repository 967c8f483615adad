#pragma once

#include <cstdint>
#include <vector>

#include "sarm/env.hpp"

namespace sarm {

// Dense action-value table over 1-based state ids; unvisited pairs are 0.
class QTable {
 public:
  QTable(StateId states, int actions)
      : states_(states), actions_(actions),
        values_(static_cast<std::size_t>(states + 1) * actions, 0.0) {}

  double at(StateId s, Action a) const { return values_[index(s, a)]; }
  double& at(StateId s, Action a) { return values_[index(s, a)]; }

  double max_value(StateId s) const;
  /// Greedy action, ties broken by lowest action id.
  Action greedy(StateId s) const;

  StateId states() const { return states_; }
  int actions() const { return actions_; }

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t index(StateId s, Action a) const {
    return static_cast<std::size_t>(s) * actions_ + a;
  }
  StateId states_;
  int actions_;
  std::vector<double> values_;
};

struct LearnerParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
  int episodes = 1000;
  int max_steps = 1000;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  std::vector<StateId> states;
  std::vector<Action> actions;
  std::vector<double> rewards;
  double total_reward = 0.0;
  bool reached_goal = false;

  int steps() const { return static_cast<int>(actions.size()); }
};

struct TrainResult {
  QTable q;
  std::vector<EpisodeRecord> episodes;
};

/// Tabular Q-learning with an epsilon-greedy behavior policy. Every episode
/// is recorded; runs are bit-deterministic for a fixed seed.
TrainResult train(const Env& env, const LearnerParams& params);

/// Follows argmax-Q from `start`, recording like train() does.
EpisodeRecord greedy_rollout(const Env& env, const QTable& q, StateId start,
                             Rng& rng, int max_steps);

/// Goal-reaching episodes with highest total reward, ties broken by earlier
/// episode index; returns all successes when fewer than k exist.
std::vector<EpisodeRecord> select_successful(
    const std::vector<EpisodeRecord>& records, std::size_t k);

}  // namespace sarm
