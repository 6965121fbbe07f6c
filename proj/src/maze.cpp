#include "mazenet/maze.hpp"

#include <cmath>
#include <deque>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "mazenet/error.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

namespace {

constexpr int kGenerationAttempts = 1000;
constexpr int kLegacyBlocked = 25;

std::vector<int> bfs_steps(const Maze& maze) {
  std::vector<int> steps(maze.cell_count(), TargetSolution::kBlocked);
  std::deque<Cell> frontier;
  steps[maze.index(maze.goal())] = 0;
  frontier.push_back(maze.goal());
  while (!frontier.empty()) {
    const Cell c = frontier.front();
    frontier.pop_front();
    const int next = steps[maze.index(c)] + 1;
    for (Direction d : kDirections) {
      const Cell nb = step(c, d);
      if (!maze.in_bounds(nb) || maze.at(nb) == CellKind::Obstacle) continue;
      int& s = steps[maze.index(nb)];
      if (s != TargetSolution::kBlocked) continue;
      s = next;
      frontier.push_back(nb);
    }
  }
  return steps;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  // Trailing blank lines carry no rows.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

}  // namespace

std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Up:
      return "up";
    case Direction::Down:
      return "down";
    case Direction::Left:
      return "left";
    case Direction::Right:
      return "right";
  }
  return "?";
}

Direction DirectionSet::first() const {
  for (auto d : kDirections)
    if (contains(d)) return d;
  throw DomainError("DirectionSet::first on empty set");
}

std::vector<Direction> DirectionSet::members() const {
  std::vector<Direction> out;
  for (auto d : kDirections)
    if (contains(d)) out.push_back(d);
  return out;
}

Maze::Maze(int n, std::vector<CellKind> grid) : n_(n), grid_(std::move(grid)), goal_{-1, -1} {
  if (n < 1) throw ArgumentError("maze side length must be positive, got " + std::to_string(n));
  if (grid_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ArgumentError("maze grid has " + std::to_string(grid_.size()) + " cells, expected " +
                        std::to_string(n * n));
  int goals = 0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (grid_[i] == CellKind::Goal) {
      ++goals;
      goal_ = cell(i);
    }
  }
  if (goals != 1)
    throw ArgumentError("maze must contain exactly one goal, found " + std::to_string(goals));
}

TargetSolution::TargetSolution(int n, std::vector<int> steps) : n_(n), steps_(std::move(steps)) {
  if (n < 1 || steps_.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
    throw ArgumentError("target solution shape mismatch");
  for (int v : steps_)
    if (v < kBlocked) throw ArgumentError("negative step count in target solution");
}

Maze generate_maze(int n, double obstacle_fraction, std::uint64_t seed) {
  if (n < 3) throw ArgumentError("generate_maze: n must be >= 3, got " + std::to_string(n));
  if (!(obstacle_fraction >= 0.0 && obstacle_fraction <= 0.5))
    throw ArgumentError("generate_maze: obstacle_fraction must lie in [0, 0.5]");

  Rng rng(seed);
  const auto cells = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
    std::vector<CellKind> grid(cells, CellKind::Path);
    const auto goal = static_cast<std::size_t>(rng.below(cells));
    grid[goal] = CellKind::Goal;
    for (std::size_t i = 0; i < cells; ++i) {
      if (i == goal) continue;
      if (rng.bernoulli(obstacle_fraction)) grid[i] = CellKind::Obstacle;
    }
    Maze maze(n, std::move(grid));
    if (is_connected(maze)) return maze;
  }
  std::ostringstream msg;
  msg << "generate_maze: no connected maze after " << kGenerationAttempts
      << " attempts (n=" << n << ", obstacle_fraction=" << obstacle_fraction
      << ", seed=" << seed << ")";
  throw GenerationError(msg.str());
}

TargetSolution solve_target(const Maze& maze) { return {maze.size(), bfs_steps(maze)}; }

bool is_connected(const Maze& maze) {
  const auto steps = bfs_steps(maze);
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (maze.cells()[i] == CellKind::Path && steps[i] == TargetSolution::kBlocked) return false;
  return true;
}

DirectionSet good_directions(const TargetSolution& target, Cell cell) {
  if (!target.in_bounds(cell)) throw DomainError("good_directions: cell outside grid");
  const auto here = target.steps(cell);
  if (!here) throw DomainError("good_directions: cell is blocked");
  if (*here == 0) throw DomainError("good_directions: cell is the goal");
  DirectionSet out;
  for (Direction d : kDirections) {
    const Cell nb = step(cell, d);
    if (!target.in_bounds(nb)) continue;
    const auto s = target.steps(nb);
    if (s && *s == *here - 1) out.insert(d);
  }
  return out;
}

double euclid_to_goal(const Maze& maze, Cell cell) {
  const double dr = cell.row - maze.goal().row;
  const double dc = cell.col - maze.goal().col;
  return std::sqrt(dr * dr + dc * dc);
}

SubmazeSet partition_submazes(const Maze& maze, int m) {
  const int n = maze.size();
  if (m < 1 || n % m != 0)
    throw ArgumentError("partition_submazes: tile side " + std::to_string(m) +
                        " does not divide maze side " + std::to_string(n));
  const Cell goal = maze.goal();
  SubmazeSet out;
  out.m = m;
  const int per_side = n / m;
  for (int tr = 0; tr < per_side; ++tr) {
    for (int tc = 0; tc < per_side; ++tc) {
      std::vector<CellKind> grid;
      grid.reserve(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) grid.push_back(maze.at({tr * m + r, tc * m + c}));

      const bool has_goal = goal.row / m == tr && goal.col / m == tc;
      if (!has_goal) {
        // Nearest non-obstacle cell to the global goal, first in row-major
        // order on ties; an all-obstacle tile falls back to any cell.
        auto pick = [&](bool skip_obstacles) -> int {
          int best = -1;
          double best_d = std::numeric_limits<double>::infinity();
          for (int i = 0; i < m * m; ++i) {
            if (skip_obstacles && grid[static_cast<std::size_t>(i)] == CellKind::Obstacle) continue;
            const double dr = tr * m + i / m - goal.row;
            const double dc = tc * m + i % m - goal.col;
            const double d = dr * dr + dc * dc;
            if (d < best_d) {
              best_d = d;
              best = i;
            }
          }
          return best;
        };
        int idx = pick(true);
        if (idx < 0) idx = pick(false);
        grid[static_cast<std::size_t>(idx)] = CellKind::Goal;
      }
      out.tiles.push_back(Tile{tr, tc, Maze(m, std::move(grid)), !has_goal});
    }
  }
  return out;
}

std::string format_maze(const Maze& maze) {
  std::string out;
  const int n = maze.size();
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      switch (maze.at({r, c})) {
        case CellKind::Path:
          out += '.';
          break;
        case CellKind::Obstacle:
          out += '#';
          break;
        case CellKind::Goal:
          out += 'G';
          break;
      }
    }
    out += '\n';
  }
  return out;
}

Maze parse_maze(std::string_view text, bool require_connected) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty maze", 1, 0);
  const std::size_t n = lines.size();
  std::vector<CellKind> grid;
  grid.reserve(n * n);
  std::size_t goals = 0;
  for (std::size_t r = 0; r < n; ++r) {
    if (lines[r].size() != n)
      throw ParseError("row has " + std::to_string(lines[r].size()) + " cells, expected " +
                           std::to_string(n) + " (maze must be square)",
                       r + 1, 0);
    for (std::size_t c = 0; c < n; ++c) {
      switch (lines[r][c]) {
        case '.':
          grid.push_back(CellKind::Path);
          break;
        case '#':
          grid.push_back(CellKind::Obstacle);
          break;
        case 'G':
          grid.push_back(CellKind::Goal);
          if (++goals > 1) throw ParseError("second goal cell", r + 1, c + 1);
          break;
        default:
          throw ParseError(std::string("unexpected character '") + lines[r][c] + "'", r + 1, c + 1);
      }
    }
  }
  if (goals == 0) throw ParseError("maze has no goal cell", n, 0);
  Maze maze(static_cast<int>(n), std::move(grid));
  if (require_connected && !is_connected(maze))
    throw ParseError("maze has path cells unreachable from the goal", 1, 0);
  return maze;
}

void write_maze(std::ostream& os, const Maze& maze) { os << format_maze(maze); }

Maze read_maze(std::istream& is, bool require_connected) {
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  return parse_maze(text, require_connected);
}

std::string format_target(const TargetSolution& target, bool legacy) {
  std::ostringstream os;
  const int n = target.size();
  const char sep = legacy ? '\t' : ' ';
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      if (c > 0) os << sep;
      const auto s = target.steps({r, c});
      if (s)
        os << *s;
      else if (legacy)
        os << kLegacyBlocked;
      else
        os << 'X';
    }
    os << '\n';
  }
  return os.str();
}

TargetSolution parse_target(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty target solution", 1, 0);
  const std::size_t n = lines.size();
  std::vector<int> steps;
  steps.reserve(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const std::string_view line = lines[r];
    std::size_t pos = 0;
    std::size_t count = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
      if (pos >= line.size()) break;
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
      const std::string_view tok = line.substr(start, pos - start);
      if (tok == "X") {
        steps.push_back(TargetSolution::kBlocked);
      } else {
        int v = 0;
        for (char ch : tok) {
          if (ch < '0' || ch > '9')
            throw ParseError("malformed step count '" + std::string(tok) + "'", r + 1, start + 1);
          v = v * 10 + (ch - '0');
        }
        steps.push_back(v);
      }
      ++count;
    }
    if (count != n)
      throw ParseError("row has " + std::to_string(count) + " entries, expected " +
                           std::to_string(n) + " (grid must be square)",
                       r + 1, 0);
  }
  return {static_cast<int>(n), std::move(steps)};
}

void write_target(std::ostream& os, const TargetSolution& target, bool legacy) {
  os << format_target(target, legacy);
}

TargetSolution read_target(std::istream& is) {
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  return parse_target(text);
}

}  // namespace mazenet
