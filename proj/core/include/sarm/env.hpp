#pragma once

#include <random>
#include <utility>
#include <vector>

#include "sarm/codec.hpp"

namespace sarm {

using Action = int;
using Rng = std::mt19937_64;

struct StepOutcome {
  StateId next = 0;
  double reward = 0.0;
  bool terminal = false;
};

// Episodic MDP over 1-based encoded state ids. Instances are immutable
// descriptions; stepping is a pure function of (state, action, rng).
class Env {
 public:
  virtual ~Env() = default;

  virtual StateId state_count() const = 0;
  virtual int action_count() const = 0;

  /// Largest state id the encoding can produce; ids need not start at 1,
  /// so this can exceed state_count(). Value tables are sized by this.
  virtual StateId max_state_id() const { return state_count(); }

  /// Support of P(.|s,a); probabilities sum to 1.
  virtual std::vector<std::pair<StateId, double>> transition_distribution(
      StateId s, Action a) const = 0;

  virtual double reward(StateId s, Action a, StateId next) const = 0;
  virtual bool terminal(StateId s, Action a, StateId next) const = 0;

  virtual StateId initial_state(Rng& rng) const = 0;

  /// Magnitude of the episode-completing reward (option bonus class).
  virtual double goal_reward() const = 0;

  StepOutcome sample_step(StateId s, Action a, Rng& rng) const;
};

}  // namespace sarm
