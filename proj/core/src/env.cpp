#include "sarm/env.hpp"

#include <stdexcept>

namespace sarm {

StepOutcome Env::sample_step(StateId s, Action a, Rng& rng) const {
  const auto dist = transition_distribution(s, a);
  if (dist.empty()) throw std::logic_error("sample_step: empty distribution");
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  StateId next = dist.back().first;
  for (const auto& [state, p] : dist) {
    if (u < p) {
      next = state;
      break;
    }
    u -= p;
  }
  return {next, reward(s, a, next), terminal(s, a, next)};
}

}  // namespace sarm
