#include "sarm/hrl.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace sarm {

bool OptionPolicy::is_exit(StateId s, Action a) const {
  for (const auto& e : exits) {
    if (e.state == s && e.action == a) return true;
  }
  return false;
}

namespace {

// Most likely next state; ties resolved by the distribution's order.
StateId likely_next(const Env& env, StateId s, Action a) {
  const auto dist = env.transition_distribution(s, a);
  StateId best = dist.front().first;
  double best_p = dist.front().second;
  for (const auto& [next, p] : dist) {
    if (p > best_p) {
      best = next;
      best_p = p;
    }
  }
  return best;
}

}  // namespace

OptionLearnResult learn_option(const Env& env, const Subtask& subtask,
                               const LearnerParams& params) {
  if (subtask.states.empty() || subtask.exits.empty()) {
    throw std::invalid_argument("learn_option: subtask without states or exits");
  }
  OptionPolicy option{subtask.id, QTable(env.max_state_id(), env.action_count()),
                      subtask.states, subtask.exits, 0.0};
  const double bonus = env.goal_reward();

  Rng rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Action> any_action(0, env.action_count() - 1);
  std::uniform_int_distribution<std::size_t> any_start(0,
                                                       subtask.states.size() - 1);

  for (int ep = 0; ep < params.episodes; ++ep) {
    StateId s = subtask.states[any_start(rng)];
    for (int step = 0; step < params.max_steps; ++step) {
      const Action a =
          unit(rng) < params.epsilon ? any_action(rng) : option.q.greedy(s);
      const bool exit_fired = option.is_exit(s, a);
      StepOutcome out = env.sample_step(s, a, rng);
      double reward = out.reward;
      StateId next = out.next;
      if (exit_fired) {
        reward += bonus;
      } else if (!option.admissible(next)) {
        next = s;  // confined to the region
      }
      const double target =
          reward + (exit_fired ? 0.0 : params.gamma * option.q.max_value(next));
      option.q.at(s, a) += params.alpha * (target - option.q.at(s, a));
      if (exit_fired) break;
      s = next;
    }
  }

  // Exit reachability under the deterministic closure of intended moves.
  std::set<StateId> can_reach;
  for (StateId s : subtask.states) {
    for (const auto& e : subtask.exits) {
      if (e.state == s) can_reach.insert(s);
    }
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (StateId s : subtask.states) {
      if (can_reach.count(s)) continue;
      for (Action a = 0; a < env.action_count(); ++a) {
        const StateId next = likely_next(env, s, a);
        if (can_reach.count(next)) {
          can_reach.insert(s);
          grew = true;
          break;
        }
      }
    }
  }
  OptionLearnResult result{std::move(option), {}};
  for (StateId s : subtask.states) {
    if (!can_reach.count(s)) result.unreachable.push_back(s);
  }
  return result;
}

OptionExecution execute_option(const Env& env, const OptionPolicy& option,
                               StateId s, double gamma, Rng& rng, int max_steps,
                               std::vector<StateId>* visited,
                               EpisodeRecord* record) {
  OptionExecution exec;
  double discount = 1.0;
  StateId cur = s;
  if (visited) visited->push_back(cur);
  while (exec.steps < max_steps) {
    const Action a = option.q.greedy(cur);
    const bool exit_fired = option.is_exit(cur, a);
    const StepOutcome out = env.sample_step(cur, a, rng);
    exec.discounted_reward += discount * out.reward;
    discount *= gamma;
    ++exec.steps;
    if (record) {
      record->actions.push_back(a);
      record->rewards.push_back(out.reward);
      record->states.push_back(out.next);
      record->total_reward += out.reward;
    }
    cur = out.next;
    if (visited) visited->push_back(cur);
    if (out.terminal) {
      exec.env_terminal = true;
      break;
    }
    if (exit_fired) break;
    if (!option.admissible(cur)) {
      exec.interrupted = true;
      break;
    }
  }
  exec.end_state = cur;
  return exec;
}

namespace {

struct Choice {
  bool primitive = true;
  Action action = 0;    // primitive id
  int option_index = -1;
};

}  // namespace

AbstractQ smdp_train(const Env& env, const std::vector<OptionPolicy>& options,
                     const LearnerParams& params,
                     std::vector<EpisodeRecord>* episodes) {
  const int primitives = env.action_count();
  AbstractQ abs{QTable(env.max_state_id(),
                       primitives + static_cast<int>(options.size())),
                primitives, static_cast<int>(options.size())};
  Rng rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kTieTol = 1e-9;

  auto admissible_options = [&](StateId s) {
    std::vector<int> adm;
    for (std::size_t j = 0; j < options.size(); ++j) {
      if (options[j].admissible(s)) adm.push_back(static_cast<int>(j));
    }
    return adm;
  };

  auto max_admissible = [&](StateId s) {
    double best = abs.q.at(s, 0);
    for (Action a = 1; a < primitives; ++a) best = std::max(best, abs.q.at(s, a));
    for (int j : admissible_options(s)) {
      best = std::max(best, abs.q.at(s, abs.option_column(j)));
    }
    return best;
  };

  auto choose = [&](StateId s, const std::vector<int>& adm) {
    Choice c;
    const int total = primitives + static_cast<int>(adm.size());
    if (unit(rng) < params.epsilon) {
      const int pick = std::uniform_int_distribution<int>(0, total - 1)(rng);
      if (pick < primitives) {
        c = {true, pick, -1};
      } else {
        c = {false, 0, adm[pick - primitives]};
      }
      return c;
    }
    // Strict argmax, lowest column first (primitives before options).
    Action best_col = 0;
    double best = abs.q.at(s, 0);
    for (Action a = 1; a < primitives; ++a) {
      if (abs.q.at(s, a) > best) {
        best = abs.q.at(s, a);
        best_col = a;
      }
    }
    int best_option = -1;
    for (int j : adm) {
      const double v = abs.q.at(s, abs.option_column(j));
      if (v > best) {
        best = v;
        best_col = abs.option_column(j);
        best_option = j;
      }
    }
    // Rule confidence breaks near-ties in favor of options.
    int preferred = best_option;
    double preferred_conf = best_option >= 0 ? options[best_option].confidence : -1.0;
    for (int j : adm) {
      const double v = abs.q.at(s, abs.option_column(j));
      if (v + kTieTol >= best && options[j].confidence > preferred_conf) {
        preferred = j;
        preferred_conf = options[j].confidence;
      }
    }
    if (preferred >= 0) return Choice{false, 0, preferred};
    return Choice{true, best_col, -1};
  };

  for (int ep = 0; ep < params.episodes; ++ep) {
    EpisodeRecord rec;
    StateId s = env.initial_state(rng);
    rec.states.push_back(s);
    int steps = 0;
    bool terminal = false;
    while (steps < params.max_steps && !terminal) {
      const auto adm = admissible_options(s);
      const Choice c = choose(s, adm);
      if (c.primitive) {
        const StepOutcome out = env.sample_step(s, c.action, rng);
        const double target =
            out.reward +
            (out.terminal ? 0.0 : params.gamma * max_admissible(out.next));
        abs.q.at(s, c.action) += params.alpha * (target - abs.q.at(s, c.action));
        rec.actions.push_back(c.action);
        rec.rewards.push_back(out.reward);
        rec.states.push_back(out.next);
        rec.total_reward += out.reward;
        s = out.next;
        terminal = out.terminal;
        ++steps;
      } else {
        const OptionPolicy& opt = options[c.option_index];
        const OptionExecution exec = execute_option(
            env, opt, s, params.gamma, rng, params.max_steps - steps, nullptr,
            &rec);
        double discount = 1.0;
        for (int i = 0; i < exec.steps; ++i) discount *= params.gamma;
        const Action col = abs.option_column(c.option_index);
        const double target =
            exec.discounted_reward +
            (exec.env_terminal ? 0.0 : discount * max_admissible(exec.end_state));
        abs.q.at(s, col) += params.alpha * (target - abs.q.at(s, col));
        s = exec.end_state;
        terminal = exec.env_terminal;
        steps += std::max(exec.steps, 1);
      }
    }
    rec.reached_goal = terminal;
    if (episodes) episodes->push_back(std::move(rec));
  }
  return abs;
}

double decomposed_value(
    const TaskHierarchy& hierarchy,
    const std::function<double(int task, StateId s, int action)>& task_q,
    int primitive_actions, int task, StateId s) {
  std::set<int> on_stack;
  std::function<double(int)> eval = [&](int id) -> double {
    if (!on_stack.insert(id).second) {
      throw std::logic_error("decomposed_value: cycle in the task hierarchy");
    }
    const Subtask& t = hierarchy.subtasks.at(id);
    double best = -std::numeric_limits<double>::infinity();
    // Child-option actions first, then primitives.
    for (std::size_t c = 0; c < t.children.size(); ++c) {
      best = std::max(best, eval(t.children[c]) +
                                task_q(id, s, static_cast<int>(c)));
    }
    for (int a = 0; a < primitive_actions; ++a) {
      best = std::max(best,
                      task_q(id, s, static_cast<int>(t.children.size()) + a));
    }
    on_stack.erase(id);
    return best;
  };
  return eval(task);
}

}  // namespace sarm
