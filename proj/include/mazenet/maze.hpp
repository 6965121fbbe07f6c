#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mazenet {

enum class CellKind : std::uint8_t { Path, Obstacle, Goal };

struct Cell {
  int row = 0;
  int col = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Canonical order Up, Down, Left, Right is used for every tie-break.
enum class Direction : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr std::array<Direction, 4> kDirections = {Direction::Up, Direction::Down,
                                                         Direction::Left, Direction::Right};

constexpr Cell step(Cell c, Direction d) noexcept {
  switch (d) {
    case Direction::Up:
      return {c.row - 1, c.col};
    case Direction::Down:
      return {c.row + 1, c.col};
    case Direction::Left:
      return {c.row, c.col - 1};
    case Direction::Right:
      return {c.row, c.col + 1};
  }
  return c;
}

std::string_view to_string(Direction d) noexcept;

// Small bit set over the four directions; iterates in canonical order.
class DirectionSet {
 public:
  constexpr DirectionSet() = default;

  constexpr void insert(Direction d) noexcept { bits_ |= bit(d); }
  constexpr bool contains(Direction d) const noexcept { return (bits_ & bit(d)) != 0; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  constexpr int size() const noexcept {
    int k = 0;
    for (auto d : kDirections) k += contains(d) ? 1 : 0;
    return k;
  }
  // Earliest member in canonical order. Precondition: !empty().
  Direction first() const;
  std::vector<Direction> members() const;

  friend bool operator==(const DirectionSet&, const DirectionSet&) = default;

 private:
  static constexpr std::uint8_t bit(Direction d) noexcept {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(d));
  }
  std::uint8_t bits_ = 0;
};

// Square grid with exactly one goal. Cells are stored row-major.
class Maze {
 public:
  // Throws ArgumentError unless grid has n*n entries and exactly one Goal.
  Maze(int n, std::vector<CellKind> grid);

  int size() const noexcept { return n_; }
  Cell goal() const noexcept { return goal_; }
  CellKind at(Cell c) const { return grid_[index(c)]; }
  bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.col >= 0 && c.row < n_ && c.col < n_;
  }
  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(c.col);
  }
  Cell cell(std::size_t index) const noexcept {
    return {static_cast<int>(index / static_cast<std::size_t>(n_)),
            static_cast<int>(index % static_cast<std::size_t>(n_))};
  }
  std::size_t cell_count() const noexcept { return grid_.size(); }
  const std::vector<CellKind>& cells() const noexcept { return grid_; }

  friend bool operator==(const Maze&, const Maze&) = default;

 private:
  int n_;
  std::vector<CellKind> grid_;
  Cell goal_;
};

// Per-cell shortest step count to the goal; nullopt means Blocked.
class TargetSolution {
 public:
  static constexpr int kBlocked = -1;

  TargetSolution(int n, std::vector<int> steps);

  int size() const noexcept { return n_; }
  std::optional<int> steps(Cell c) const {
    const int v = steps_[index(c)];
    return v == kBlocked ? std::nullopt : std::optional<int>(v);
  }
  bool reached(Cell c) const { return steps_[index(c)] != kBlocked; }
  bool in_bounds(Cell c) const noexcept {
    return c.row >= 0 && c.col >= 0 && c.row < n_ && c.col < n_;
  }
  const std::vector<int>& raw() const noexcept { return steps_; }

  friend bool operator==(const TargetSolution&, const TargetSolution&) = default;

 private:
  std::size_t index(Cell c) const noexcept {
    return static_cast<std::size_t>(c.row) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(c.col);
  }
  int n_;
  std::vector<int> steps_;
};

struct Tile {
  int tile_row = 0;
  int tile_col = 0;
  Maze maze;
  bool pseudo_goal = false;  // goal was placed by the partitioner
};

struct SubmazeSet {
  int m = 0;
  std::vector<Tile> tiles;  // row-major over tile positions
};

Maze generate_maze(int n, double obstacle_fraction, std::uint64_t seed);

// Breadth-first search from the goal over 4-connected non-obstacle cells.
TargetSolution solve_target(const Maze& maze);

// True when every Path cell is reachable from the goal.
bool is_connected(const Maze& maze);

// Directions whose neighbor is exactly one step closer. Throws DomainError
// on the goal or on a Blocked cell.
DirectionSet good_directions(const TargetSolution& target, Cell cell);

double euclid_to_goal(const Maze& maze, Cell cell);

SubmazeSet partition_submazes(const Maze& maze, int m);

// Text form: '.', '#', 'G', one line per row.
std::string format_maze(const Maze& maze);
Maze parse_maze(std::string_view text, bool require_connected = false);
void write_maze(std::ostream& os, const Maze& maze);
Maze read_maze(std::istream& is, bool require_connected = false);

// Whitespace-separated step counts with 'X' for Blocked. Legacy mode prints
// every Blocked cell as 25, tab-separated, and cannot be read back.
std::string format_target(const TargetSolution& target, bool legacy = false);
TargetSolution parse_target(std::string_view text);
void write_target(std::ostream& os, const TargetSolution& target, bool legacy = false);
TargetSolution read_target(std::istream& is);

}  // namespace mazenet
