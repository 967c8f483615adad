#include "sarm/key_maze.hpp"

#include <map>
#include <stdexcept>

namespace sarm {

ProgressSpec ProgressSpec::chain(std::vector<char> order) {
  ProgressSpec p;
  p.mode = Mode::chain;
  p.admissible_orders.push_back(std::move(order));
  return p;
}

ProgressSpec ProgressSpec::tree(std::vector<std::vector<char>> orders) {
  if (orders.empty()) throw std::invalid_argument("ProgressSpec: no orders");
  for (const auto& o : orders) {
    if (o.size() != orders.front().size()) {
      throw std::invalid_argument("ProgressSpec: orders of unequal length");
    }
  }
  ProgressSpec p;
  p.mode = Mode::tree;
  p.admissible_orders = std::move(orders);
  return p;
}

int ProgressSpec::levels() const {
  return admissible_orders.empty()
             ? 0
             : static_cast<int>(admissible_orders.front().size());
}

bool ProgressSpec::advances(int level, char label) const {
  for (const auto& order : admissible_orders) {
    if (level < static_cast<int>(order.size()) && order[level] == label) {
      return true;
    }
  }
  return false;
}

KeyMaze::KeyMaze(GridMap map, ProgressSpec progress, Cell start, Cell goal,
                 double slip, RewardScheme scheme)
    : map_(std::move(map)),
      progress_(std::move(progress)),
      start_(start),
      goal_(goal),
      slip_(slip),
      scheme_(scheme) {
  if (!map_.in_bounds(start_) || map_.wall(start_)) {
    throw std::invalid_argument("KeyMaze: bad start cell");
  }
  if (!map_.in_bounds(goal_) || map_.wall(goal_)) {
    throw std::invalid_argument("KeyMaze: bad goal cell");
  }
  if (slip_ < 0.0 || slip_ > 1.0) {
    throw std::invalid_argument("KeyMaze: slip outside [0,1]");
  }
}

StateId KeyMaze::state_count() const {
  return static_cast<StateId>(map_.cell_count()) * (levels() + 1);
}

int KeyMaze::action_count() const {
  return scheme_ == RewardScheme::goal_only ? 4 : 5;
}

StateId KeyMaze::encode_state(Cell c, int progress) const {
  return static_cast<StateId>(map_.cell_index(c)) +
         static_cast<StateId>(map_.cell_count()) * progress;
}

std::pair<Cell, int> KeyMaze::decode_state(StateId s) const {
  if (s < 1 || s > state_count()) {
    throw std::out_of_range("KeyMaze: state id out of range");
  }
  const int cells = map_.cell_count();
  const int progress = static_cast<int>((s - 1) / cells);
  const int cell = static_cast<int>((s - 1) % cells) + 1;
  return {map_.cell_at(cell), progress};
}

Cell KeyMaze::move_target(Cell c, Action a) const {
  Cell t = c;
  switch (a) {
    case kUp: t.y -= 1; break;
    case kRight: t.x += 1; break;
    case kDown: t.y += 1; break;
    case kLeft: t.x -= 1; break;
    default: throw std::invalid_argument("KeyMaze: bad movement action");
  }
  if (!map_.in_bounds(t) || map_.wall(t)) return c;
  return t;
}

std::vector<std::pair<StateId, double>> KeyMaze::transition_distribution(
    StateId s, Action a) const {
  if (a < 0 || a >= action_count()) {
    throw std::invalid_argument("KeyMaze: invalid action id " +
                                std::to_string(a));
  }
  const auto [cell, level] = decode_state(s);
  if (a == kPress) {
    int next_level = level;
    const char label = map_.subgoal_label(cell);
    if (label != '\0' && level < levels() && progress_.advances(level, label)) {
      next_level = level + 1;
    }
    return {{encode_state(cell, next_level), 1.0}};
  }
  // Intended direction receives 1-slip plus its share of the uniform
  // slip spread over all four movement directions.
  std::map<StateId, double> acc;
  for (Action dir = 0; dir < 4; ++dir) {
    const double p = (dir == a ? 1.0 - slip_ : 0.0) + slip_ / 4.0;
    if (p <= 0.0) continue;
    acc[encode_state(move_target(cell, dir), level)] += p;
  }
  return {acc.begin(), acc.end()};
}

double KeyMaze::reward(StateId s, Action a, StateId next) const {
  const auto [cell, level] = decode_state(s);
  if (scheme_ == RewardScheme::goal_only) {
    return decode_state(next).first == goal_ ? 10.0 : 0.0;
  }
  if (a == kPress) {
    if (cell == goal_ && level == levels()) return 10.0;
    if (map_.subgoal_label(cell) != '\0') return 0.0;
    return -10.0;
  }
  return -1.0;
}

bool KeyMaze::terminal(StateId s, Action a, StateId next) const {
  const auto [cell, level] = decode_state(s);
  if (scheme_ == RewardScheme::goal_only) {
    const auto [ncell, nlevel] = decode_state(next);
    (void)nlevel;
    return ncell == goal_;
  }
  (void)next;
  return a == kPress && cell == goal_ && level == levels();
}

StateId KeyMaze::initial_state(Rng& /*rng*/) const {
  return encode_state(start_, 0);
}

}  // namespace sarm
