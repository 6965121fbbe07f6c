#include "mazenet/metrics.hpp"

#include <ostream>

#include "mazenet/error.hpp"

namespace mazenet {

Direction canonical_direction(const TargetSolution& target, Cell cell) {
  return good_directions(target, cell).first();
}

ScoreReport score(std::span<const double> outputs, const Maze& maze, const TargetSolution& target,
                  bool keep_cells) {
  if (target.size() != maze.size() || outputs.size() != maze.cell_count())
    throw ArgumentError("score: outputs, maze and target disagree in size");
  ScoreReport report;
  for (std::size_t i = 0; i < maze.cell_count(); ++i) {
    const Cell c = maze.cell(i);
    if (maze.at(c) != CellKind::Path || !target.reached(c)) continue;
    const DirectionSet good = good_directions(target, c);
    const Direction canonical = good.first();
    const Direction predicted = predicted_direction(outputs, maze, c);
    const bool is_good = predicted == canonical;
    const bool is_correct = good.contains(predicted);
    ++report.graded_cells;
    report.good_cells += is_good ? 1 : 0;
    report.correct_cells += is_correct ? 1 : 0;
    if (keep_cells) report.per_cell.push_back({c, predicted, good, canonical, is_good, is_correct});
  }
  if (report.graded_cells == 0) throw DomainError("score: maze has no gradable path cells");
  const auto graded = static_cast<double>(report.graded_cells);
  report.goodness = static_cast<double>(report.good_cells) / graded;
  report.correctness = static_cast<double>(report.correct_cells) / graded;
  return report;
}

ScoreReport score(const NetworkState& state, const Maze& maze, const TargetSolution& target,
                  bool keep_cells) {
  return score(state.outputs, maze, target, keep_cells);
}

BatchScore batch_score(std::span<const ScoreReport> reports) {
  if (reports.empty()) throw ArgumentError("batch_score: no reports");
  BatchScore out;
  for (const auto& r : reports) {
    out.goodness += r.goodness;
    out.correctness += r.correctness;
  }
  out.goodness /= static_cast<double>(reports.size());
  out.correctness /= static_cast<double>(reports.size());
  return out;
}

ScoreReport pool_reports(std::span<const ScoreReport> reports) {
  ScoreReport out;
  for (const auto& r : reports) {
    out.graded_cells += r.graded_cells;
    out.good_cells += r.good_cells;
    out.correct_cells += r.correct_cells;
    out.per_cell.insert(out.per_cell.end(), r.per_cell.begin(), r.per_cell.end());
  }
  if (out.graded_cells == 0) throw DomainError("pool_reports: no graded cells");
  const auto graded = static_cast<double>(out.graded_cells);
  out.goodness = static_cast<double>(out.good_cells) / graded;
  out.correctness = static_cast<double>(out.correct_cells) / graded;
  return out;
}

void write_cell_csv(std::ostream& os, const ScoreReport& report) {
  os << "row,col,predicted,canonical,good_set,is_good,is_correct\n";
  for (const auto& g : report.per_cell) {
    os << g.cell.row << ',' << g.cell.col << ',' << to_string(g.predicted) << ','
       << to_string(g.canonical) << ',';
    bool first = true;
    for (Direction d : g.good.members()) {
      if (!first) os << '|';
      os << to_string(d);
      first = false;
    }
    os << ',' << (g.is_good ? 1 : 0) << ',' << (g.is_correct ? 1 : 0) << '\n';
  }
}

}  // namespace mazenet
