#pragma once

#include <string>
#include <vector>

namespace sarm {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

// ASCII grid map. Glyphs: '#' wall, '.' open, 'T' goal candidate,
// 'S' start candidate, any other alphanumeric labels a subgoal cell.
class GridMap {
 public:
  static GridMap parse(const std::string& text);
  static GridMap open_grid(int width, int height);

  std::string render() const;

  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width_ && c.y >= 0 && c.y < height_;
  }
  bool wall(Cell c) const { return wall_[c.y * width_ + c.x]; }

  /// 1-based row-major index (walls included).
  int cell_index(Cell c) const { return c.y * width_ + c.x + 1; }
  Cell cell_at(int index) const {
    return {(index - 1) % width_, (index - 1) / width_};
  }

  struct Subgoal {
    char label;
    Cell cell;
  };
  const std::vector<Subgoal>& subgoals() const { return subgoals_; }
  /// '\0' when the cell carries no subgoal label.
  char subgoal_label(Cell c) const;

  const std::vector<Cell>& goal_candidates() const { return goal_candidates_; }
  const std::vector<Cell>& start_candidates() const { return start_candidates_; }
  std::vector<Cell> open_cells() const;

  void set_subgoal(char label, Cell c);

 private:
  GridMap() = default;
  int width_ = 0;
  int height_ = 0;
  std::vector<bool> wall_;
  std::vector<Subgoal> subgoals_;
  std::vector<Cell> goal_candidates_;
  std::vector<Cell> start_candidates_;
};

}  // namespace sarm
