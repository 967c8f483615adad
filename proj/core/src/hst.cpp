#include "sarm/hst.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sarm {

HSTNode* HSTNode::find_child(StateId item) {
  for (auto& c : children) {
    if (c->subgoal && *c->subgoal == item) return c.get();
  }
  return nullptr;
}

const HSTNode* HSTNode::find_child(StateId item) const {
  return const_cast<HSTNode*>(this)->find_child(item);
}

void hst_insert(HSTNode& root, const SequentialRule& rule) {
  const std::vector<StateId> seq = rule.sequence();
  HSTNode* parent = &root;
  // Items are matched from the end of the rule: consequent first.
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    HSTNode* child = parent->find_child(*it);
    if (!child) {
      auto node = std::make_unique<HSTNode>();
      node->subgoal = *it;
      child = node.get();
      parent->children.push_back(std::move(node));
    }
    child->confidence = std::max(child->confidence, rule.confidence);
    parent = child;
  }
  parent->rule_terminal = true;
}

std::unique_ptr<HSTNode> hst_construct(std::vector<SequentialRule> rules) {
  std::sort(rules.begin(), rules.end(),
            [](const SequentialRule& a, const SequentialRule& b) {
              if (a.confidence != b.confidence) return a.confidence > b.confidence;
              if (a.support != b.support) return a.support > b.support;
              return a.sequence() < b.sequence();
            });
  auto root = std::make_unique<HSTNode>();
  for (const auto& rule : rules) hst_insert(*root, rule);
  return root;
}

std::size_t hst_node_count(const HSTNode& root) {
  std::size_t n = 0;
  for (const auto& c : root.children) n += 1 + hst_node_count(*c);
  return n;
}

bool hst_equal(const HSTNode& a, const HSTNode& b) {
  if (a.subgoal != b.subgoal || a.children.size() != b.children.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i) {
    if (!hst_equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

namespace {

void render_node(const HSTNode& node, int depth, std::ostringstream& out) {
  for (const auto& c : node.children) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << 's'
        << *c->subgoal;
    if (c->rule_terminal) out << '*';
    out << '\n';
    render_node(*c, depth + 1, out);
  }
}

}  // namespace

std::string hst_render(const HSTNode& root) {
  std::ostringstream out;
  out << "R\n";
  render_node(root, 1, out);
  return out.str();
}

namespace {

// First-occurrence index of `s` in `traj`, or -1.
int first_index(const StateActionTrajectory& traj, StateId s) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    if (traj.states[i] == s) return static_cast<int>(i);
  }
  return -1;
}

Action majority_action(const std::map<Action, int>& votes) {
  Action best = -1;
  int best_count = -1;
  for (const auto& [a, c] : votes) {
    if (c > best_count) {  // map order gives lowest-id tie-break
      best = a;
      best_count = c;
    }
  }
  return best;
}

}  // namespace

std::vector<Exit> extract_exits(const std::vector<StateId>& subgoals,
                                const std::vector<StateActionTrajectory>& trajs) {
  struct Info {
    StateId subgoal;
    double mean_pos = 0.0;
    Action action = 0;
    StateId successor = 0;  // majority next state, 0 if none
  };
  std::set<StateId> subgoal_set(subgoals.begin(), subgoals.end());
  std::vector<Info> infos;

  for (StateId sg : subgoals) {
    std::map<Action, int> action_votes;
    std::map<StateId, int> successor_votes;
    double pos_sum = 0.0;
    int seen = 0;
    for (const auto& traj : trajs) {
      const int t = first_index(traj, sg);
      if (t < 0) continue;
      ++seen;
      pos_sum += t;
      if (t < static_cast<int>(traj.actions.size())) {
        action_votes[traj.actions[t]] += 1;
        successor_votes[traj.states[t + 1]] += 1;
      } else if (!traj.actions.empty()) {
        // Trajectory-final subgoal: the episode-ending action.
        action_votes[traj.actions.back()] += 1;
      }
    }
    if (seen == 0 || action_votes.empty()) continue;
    Info info;
    info.subgoal = sg;
    info.mean_pos = pos_sum / seen;
    info.action = majority_action(action_votes);
    StateId best_succ = 0;
    int best_count = -1;
    for (const auto& [s, c] : successor_votes) {
      if (c > best_count) {
        best_succ = s;
        best_count = c;
      }
    }
    info.successor = best_succ;
    infos.push_back(info);
  }

  std::sort(infos.begin(), infos.end(), [](const Info& a, const Info& b) {
    return a.mean_pos != b.mean_pos ? a.mean_pos < b.mean_pos
                                    : a.subgoal < b.subgoal;
  });

  // Two subgoals consecutive via one action collapse into one exit.
  std::set<StateId> dropped;
  std::vector<Exit> exits;
  for (const auto& info : infos) {
    if (dropped.count(info.subgoal)) continue;
    exits.push_back({info.subgoal, info.action});
    if (info.successor != 0 && subgoal_set.count(info.successor)) {
      dropped.insert(info.successor);
    }
  }
  return exits;
}

std::vector<std::vector<StateId>> cluster_adjacent_subgoals(
    const std::vector<StateId>& subgoals,
    const std::vector<std::vector<StateId>>& trajs, int window) {
  const std::size_t n = subgoals.size();
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };

  // First-occurrence index per trajectory.
  auto occurrence = [&](const std::vector<StateId>& traj, StateId s) {
    for (std::size_t t = 0; t < traj.size(); ++t) {
      if (traj[t] == s) return static_cast<int>(t);
    }
    return -1;
  };

  std::vector<double> mean_pos(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    int seen = 0;
    for (const auto& traj : trajs) {
      const int t = occurrence(traj, subgoals[i]);
      if (t >= 0) {
        sum += t;
        ++seen;
      }
    }
    mean_pos[i] = seen ? sum / seen : 0.0;
  }

  if (window >= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        int shared = 0, close = 0;
        for (const auto& traj : trajs) {
          const int ti = occurrence(traj, subgoals[i]);
          const int tj = occurrence(traj, subgoals[j]);
          if (ti < 0 || tj < 0) continue;
          ++shared;
          if (std::abs(ti - tj) <= window) ++close;
        }
        if (shared > 0 && close * 2 > shared) parent[find(i)] = find(j);
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

  std::vector<std::vector<StateId>> clusters;
  for (auto& [rep, members] : groups) {
    // Representative: earliest mean first occurrence, ties by id.
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                if (mean_pos[a] != mean_pos[b]) return mean_pos[a] < mean_pos[b];
                return subgoals[a] < subgoals[b];
              });
    std::vector<StateId> cluster;
    for (std::size_t m : members) cluster.push_back(subgoals[m]);
    clusters.push_back(std::move(cluster));
  }
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

bool Subtask::contains(StateId s) const {
  return std::binary_search(states.begin(), states.end(), s);
}

int TaskHierarchy::region_of(StateId s) const {
  for (const auto& t : subtasks) {
    if (t.contains(s)) return t.id;
  }
  return -1;
}

namespace {

bool is_exit_pair(const std::vector<Exit>& exits, StateId s, Action a) {
  for (const auto& e : exits) {
    if (e.state == s && e.action == a) return true;
  }
  return false;
}

// Reachability closure from `entries` over env transitions, never taking
// an exit pair and never crossing into already-claimed states.
std::vector<StateId> close_region(const Env& env,
                                  const std::vector<StateId>& entries,
                                  const std::vector<Exit>& all_exits,
                                  const std::set<StateId>& claimed) {
  std::set<StateId> seen;
  std::queue<StateId> frontier;
  for (StateId s : entries) {
    if (!claimed.count(s) && seen.insert(s).second) frontier.push(s);
  }
  while (!frontier.empty()) {
    const StateId s = frontier.front();
    frontier.pop();
    for (Action a = 0; a < env.action_count(); ++a) {
      if (is_exit_pair(all_exits, s, a)) continue;
      for (const auto& [next, p] : env.transition_distribution(s, a)) {
        if (p <= 0.0 || claimed.count(next)) continue;
        if (seen.insert(next).second) frontier.push(next);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

std::vector<std::size_t> changing_variables_of(const std::vector<StateId>& states,
                                               const DomainSpec* spec) {
  if (!spec) return {0};  // MDP: the single synthetic variable
  std::vector<std::set<std::uint64_t>> values(spec->variable_count());
  for (StateId s : states) {
    const FactoredState f = decode(*spec, s);
    for (std::size_t i = 0; i < f.size(); ++i) values[i].insert(f[i]);
  }
  std::vector<std::size_t> changing;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() > 1) changing.push_back(i);
  }
  if (changing.empty()) changing.push_back(0);
  return changing;
}

}  // namespace

TaskHierarchy build_hierarchy(const std::vector<Exit>& exits,
                              const std::vector<StateActionTrajectory>& trajs,
                              const Env* env, const DomainSpec* spec) {
  if (exits.empty()) throw std::invalid_argument("build_hierarchy: no exits");

  std::vector<std::vector<StateId>> regions;
  std::vector<std::vector<Exit>> region_exits;

  if (env) {
    std::set<StateId> claimed;
    std::vector<StateId> entries;
    for (const auto& t : trajs) {
      if (!t.states.empty()) entries.push_back(t.states.front());
    }
    std::vector<Exit> remaining = exits;
    while (true) {
      std::vector<StateId> region = close_region(*env, entries, remaining, claimed);
      std::vector<Exit> fired;
      for (const auto& e : remaining) {
        if (std::binary_search(region.begin(), region.end(), e.state)) {
          fired.push_back(e);
        }
      }
      claimed.insert(region.begin(), region.end());
      regions.push_back(std::move(region));
      region_exits.push_back(fired);
      if (fired.empty()) break;
      entries.clear();
      for (const auto& e : fired) {
        for (const auto& [next, p] : env->transition_distribution(e.state, e.action)) {
          if (p > 0.0) entries.push_back(next);
        }
        std::erase(remaining, e);
      }
      if (entries.empty()) break;
    }
  } else {
    // Trajectory-only partition: walk each trajectory, advancing the
    // segment index whenever an exit fires.
    std::set<StateId> assigned;
    std::vector<std::set<StateId>> segs;
    std::size_t max_segments = 0;
    for (const auto& traj : trajs) {
      std::size_t seg = 0;
      for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const StateId s = traj.states[t];
        if (segs.size() <= seg) segs.resize(seg + 1);
        if (assigned.insert(s).second) segs[seg].insert(s);
        if (t < traj.actions.size() && is_exit_pair(exits, s, traj.actions[t])) {
          ++seg;
        }
      }
      max_segments = std::max(max_segments, seg + 1);
    }
    segs.resize(std::max(max_segments, exits.size() + 1));
    for (std::size_t i = 0; i < segs.size(); ++i) {
      regions.emplace_back(segs[i].begin(), segs[i].end());
      std::vector<Exit> fired;
      if (i < exits.size()) fired.push_back(exits[i]);
      region_exits.push_back(fired);
    }
    region_exits.back().clear();
  }

  TaskHierarchy h;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    Subtask t;
    t.id = static_cast<int>(i);
    t.states = regions[i];
    t.exits = region_exits[i];
    t.changing_variables = changing_variables_of(t.states, spec);
    if (!t.exits.empty()) t.subgoal = t.exits.front().state;
    if (i > 0) t.children.push_back(static_cast<int>(i) - 1);
    h.subtasks.push_back(std::move(t));
  }
  h.root_id = static_cast<int>(h.subtasks.size()) - 1;
  return h;
}

ConsistencyReport check_consistency(const TaskHierarchy& hierarchy,
                                    const StateActionTrajectory& traj) {
  ConsistencyReport report;
  int r = 0;
  std::vector<StateId> buffer;

  auto fail = [&](const std::string& reason) {
    report.consistent = false;
    report.segment = r;
    report.reason = reason;
    return report;
  };

  auto check_segment = [&](const Subtask& task) -> std::optional<std::string> {
    for (StateId s : buffer) {
      if (!task.contains(s)) {
        return "state " + std::to_string(s) + " outside region of subtask " +
               std::to_string(task.id);
      }
      for (const auto& e : task.exits) {
        if (e.state == s) {
          return "state " + std::to_string(s) +
                 " revisits the exit state before the exit fires";
        }
      }
    }
    return std::nullopt;
  };

  for (std::size_t t = 0; t < traj.actions.size(); ++t) {
    const StateId s = traj.states[t];
    const Action a = traj.actions[t];
    if (r > hierarchy.root_id) return fail("more segments than subtasks");
    const Subtask& task = hierarchy.subtasks[r];
    bool fired = false;
    for (const auto& e : task.exits) {
      if (e.state == s && e.action == a) {
        fired = true;
        break;
      }
    }
    if (fired) {
      if (auto reason = check_segment(task)) return fail(*reason);
      buffer.clear();
      ++r;
    } else {
      buffer.push_back(s);
    }
  }
  if (!traj.states.empty()) buffer.push_back(traj.states.back());
  if (r != hierarchy.root_id) {
    return fail("trajectory ended before firing the exits of subtask " +
                std::to_string(r));
  }
  if (auto reason = check_segment(hierarchy.subtasks[r])) return fail(*reason);
  return report;
}

std::string hierarchy_render(const TaskHierarchy& h) {
  std::ostringstream out;
  std::function<void(int, int)> walk = [&](int id, int depth) {
    const Subtask& t = h.subtasks.at(id);
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << 'T' << t.id;
    if (!t.exits.empty()) {
      out << " exit=(s" << t.exits.front().state << ",a" << t.exits.front().action
          << ')';
    }
    out << " |S|=" << t.states.size() << '\n';
    for (int c : t.children) walk(c, depth + 1);
  };
  walk(h.root_id, 0);
  return out.str();
}

std::string hierarchy_adjacency(const TaskHierarchy& h) {
  std::ostringstream out;
  for (const auto& t : h.subtasks) {
    out << t.id << '|';
    if (t.subgoal) out << *t.subgoal;
    out << '|';
    for (std::size_t i = 0; i < t.exits.size(); ++i) {
      if (i) out << ';';
      out << t.exits[i].state << ',' << t.exits[i].action;
    }
    out << '|';
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      if (i) out << ';';
      out << t.children[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sarm
