#include "sarm/qlearn.hpp"

#include <algorithm>
#include <numeric>

namespace sarm {

double QTable::max_value(StateId s) const {
  double best = at(s, 0);
  for (Action a = 1; a < actions_; ++a) best = std::max(best, at(s, a));
  return best;
}

Action QTable::greedy(StateId s) const {
  Action best = 0;
  for (Action a = 1; a < actions_; ++a) {
    if (at(s, a) > at(s, best)) best = a;
  }
  return best;
}

TrainResult train(const Env& env, const LearnerParams& params) {
  Rng rng(params.seed);
  QTable q(env.max_state_id(), env.action_count());
  std::vector<EpisodeRecord> episodes;
  episodes.reserve(params.episodes);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Action> any_action(0, env.action_count() - 1);

  for (int ep = 0; ep < params.episodes; ++ep) {
    EpisodeRecord rec;
    StateId s = env.initial_state(rng);
    rec.states.push_back(s);
    for (int step = 0; step < params.max_steps; ++step) {
      Action a = unit(rng) < params.epsilon ? any_action(rng) : q.greedy(s);
      const StepOutcome out = env.sample_step(s, a, rng);
      const double target =
          out.reward + (out.terminal ? 0.0 : params.gamma * q.max_value(out.next));
      q.at(s, a) += params.alpha * (target - q.at(s, a));
      rec.actions.push_back(a);
      rec.rewards.push_back(out.reward);
      rec.states.push_back(out.next);
      rec.total_reward += out.reward;
      s = out.next;
      if (out.terminal) {
        rec.reached_goal = true;
        break;
      }
    }
    episodes.push_back(std::move(rec));
  }
  return {std::move(q), std::move(episodes)};
}

EpisodeRecord greedy_rollout(const Env& env, const QTable& q, StateId start,
                             Rng& rng, int max_steps) {
  EpisodeRecord rec;
  StateId s = start;
  rec.states.push_back(s);
  for (int step = 0; step < max_steps; ++step) {
    const Action a = q.greedy(s);
    const StepOutcome out = env.sample_step(s, a, rng);
    rec.actions.push_back(a);
    rec.rewards.push_back(out.reward);
    rec.states.push_back(out.next);
    rec.total_reward += out.reward;
    s = out.next;
    if (out.terminal) {
      rec.reached_goal = true;
      break;
    }
  }
  return rec;
}

std::vector<EpisodeRecord> select_successful(
    const std::vector<EpisodeRecord>& records, std::size_t k) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].reached_goal) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return records[a].total_reward > records[b].total_reward;
  });
  if (idx.size() > k) idx.resize(k);
  std::vector<EpisodeRecord> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(records[i]);
  return out;
}

}  // namespace sarm
