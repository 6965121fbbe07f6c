#pragma once

#include <string>
#include <vector>

#include "mazenet/maze.hpp"
#include "mazenet/rng.hpp"

namespace testutil {

// 5x5 grid with the goal in the centre; obstacles where the published
// target grid prints 25.
inline mazenet::Maze figure6_maze() {
  return mazenet::parse_maze(
      "..#..\n"
      "#..#.\n"
      "#.G..\n"
      ".#..#\n"
      ".....\n");
}

inline mazenet::Maze open_maze(int n, mazenet::Cell goal) {
  std::vector<mazenet::CellKind> grid(static_cast<std::size_t>(n * n), mazenet::CellKind::Path);
  grid[static_cast<std::size_t>(goal.row * n + goal.col)] = mazenet::CellKind::Goal;
  return mazenet::Maze(n, std::move(grid));
}

inline int manhattan(mazenet::Cell a, mazenet::Cell b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

inline std::vector<double> uniform_values(std::size_t count, mazenet::Rng& rng, double lo = 0.0,
                                          double hi = 1.0) {
  std::vector<double> v(count);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

}  // namespace testutil
