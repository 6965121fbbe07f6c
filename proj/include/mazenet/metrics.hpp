#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "mazenet/csrn.hpp"
#include "mazenet/maze.hpp"

namespace mazenet {

struct CellGrade {
  Cell cell;
  Direction predicted;
  DirectionSet good;
  Direction canonical;
  bool is_good;     // predicted == canonical
  bool is_correct;  // predicted in good
};

// Goodness counts a cell when the predicted direction is the single
// canonical direction; correctness accepts any direction that descends the
// true step count. Only goal-reachable Path cells are graded.
struct ScoreReport {
  double goodness = 0.0;
  double correctness = 0.0;
  std::size_t graded_cells = 0;
  std::size_t good_cells = 0;
  std::size_t correct_cells = 0;
  std::vector<CellGrade> per_cell;  // filled only when requested
};

// Earliest good direction in canonical order.
Direction canonical_direction(const TargetSolution& target, Cell cell);

ScoreReport score(std::span<const double> outputs, const Maze& maze, const TargetSolution& target,
                  bool keep_cells = false);
ScoreReport score(const NetworkState& state, const Maze& maze, const TargetSolution& target,
                  bool keep_cells = false);

struct BatchScore {
  double goodness = 0.0;
  double correctness = 0.0;
};

// Unweighted mean of per-maze fractions.
BatchScore batch_score(std::span<const ScoreReport> reports);

// Cell-weighted pooling: every graded cell counts once. Reports with no
// graded cells contribute nothing.
ScoreReport pool_reports(std::span<const ScoreReport> reports);

// row,col,predicted,canonical,good_set,is_good,is_correct
void write_cell_csv(std::ostream& os, const ScoreReport& report);

}  // namespace mazenet
