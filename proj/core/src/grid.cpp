#include "sarm/grid.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace sarm {

GridMap GridMap::parse(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw std::invalid_argument("GridMap: empty map");
  GridMap m;
  m.width_ = static_cast<int>(rows[0].size());
  m.height_ = static_cast<int>(rows.size());
  m.wall_.assign(static_cast<std::size_t>(m.width_) * m.height_, false);
  for (int y = 0; y < m.height_; ++y) {
    if (static_cast<int>(rows[y].size()) != m.width_) {
      throw std::invalid_argument("GridMap: ragged row " + std::to_string(y));
    }
    for (int x = 0; x < m.width_; ++x) {
      const char g = rows[y][x];
      const Cell c{x, y};
      switch (g) {
        case '#':
          m.wall_[y * m.width_ + x] = true;
          break;
        case '.':
          break;
        case 'T':
          m.goal_candidates_.push_back(c);
          break;
        case 'S':
          m.start_candidates_.push_back(c);
          break;
        default:
          if (!std::isalnum(static_cast<unsigned char>(g))) {
            throw std::invalid_argument(std::string("GridMap: unknown glyph '") +
                                        g + "' at row " + std::to_string(y));
          }
          m.subgoals_.push_back({g, c});
      }
    }
  }
  return m;
}

GridMap GridMap::open_grid(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("GridMap: non-positive dimensions");
  }
  GridMap m;
  m.width_ = width;
  m.height_ = height;
  m.wall_.assign(static_cast<std::size_t>(width) * height, false);
  return m;
}

std::string GridMap::render() const {
  std::string out;
  out.reserve(static_cast<std::size_t>(width_ + 1) * height_);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Cell c{x, y};
      char g = wall(c) ? '#' : '.';
      for (const auto& t : goal_candidates_)
        if (t == c) g = 'T';
      for (const auto& s : start_candidates_)
        if (s == c) g = 'S';
      if (const char l = subgoal_label(c)) g = l;
      out.push_back(g);
    }
    out.push_back('\n');
  }
  return out;
}

char GridMap::subgoal_label(Cell c) const {
  for (const auto& s : subgoals_)
    if (s.cell == c) return s.label;
  return '\0';
}

std::vector<Cell> GridMap::open_cells() const {
  std::vector<Cell> cells;
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (!wall_[y * width_ + x]) cells.push_back({x, y});
  return cells;
}

void GridMap::set_subgoal(char label, Cell c) {
  if (!in_bounds(c) || wall(c)) {
    throw std::invalid_argument("GridMap: subgoal on wall or out of bounds");
  }
  subgoals_.push_back({label, c});
}

}  // namespace sarm
