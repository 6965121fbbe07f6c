#include <sstream>

#include "doctest.h"
#include "mazenet/error.hpp"
#include "mazenet/metrics.hpp"
#include "support.hpp"

using namespace mazenet;
using testutil::open_maze;

namespace {

std::vector<double> target_outputs(const Maze& m, const TargetSolution& t, double scale = 1.0) {
  std::vector<double> out(m.cell_count());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto s = t.steps(m.cell(i));
    out[i] = s ? *s * scale : 2.0 * m.size();
  }
  return out;
}

}  // namespace

TEST_CASE("canonical_direction") {
  const Maze fig = testutil::figure6_maze();
  const TargetSolution ft = solve_target(fig);
  CHECK(canonical_direction(ft, {1, 1}) == Direction::Down);
  CHECK(canonical_direction(ft, {0, 0}) == Direction::Right);
  const Maze open = open_maze(5, {3, 3});
  const TargetSolution ot = solve_target(open);
  CHECK(canonical_direction(ot, {1, 1}) == Direction::Down);
  CHECK(canonical_direction(ot, {3, 4}) == Direction::Left);
  CHECK_THROWS_AS(canonical_direction(ot, {3, 3}), DomainError);
}

TEST_CASE("target-valued outputs are always correct") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Maze m = generate_maze(10, 0.2, seed);
    const TargetSolution t = solve_target(m);
    const ScoreReport r = score(target_outputs(m, t, 1.0 / 20.0), m, t);
    CHECK(r.correctness == 1.0);
    CHECK(r.goodness == 1.0);
  }
}

TEST_CASE("ascending outputs on an open grid") {
  const Maze m = open_maze(5, {2, 2});
  const TargetSolution t = solve_target(m);
  std::vector<double> out = target_outputs(m, t);
  for (double& v : out) v = -v;
  // Only the corners, whose in-grid neighbours all lie closer, are correct.
  int correct = 0;
  int graded = 0;
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 5; ++c) {
      if (r == 2 && c == 2) continue;
      ++graded;
      Direction best = Direction::Up;
      double best_v = 1e9;
      for (Direction d : kDirections) {
        const Cell nb = step({r, c}, d);
        if (!m.in_bounds(nb)) continue;
        const double v = out[m.index(nb)];
        if (v < best_v) {
          best_v = v;
          best = d;
        }
      }
      const Cell to = step({r, c}, best);
      correct += testutil::manhattan(to, {2, 2}) < testutil::manhattan({r, c}, {2, 2});
    }
  const ScoreReport rep = score(out, m, t);
  CHECK(rep.graded_cells == static_cast<std::size_t>(graded));
  CHECK(rep.correct_cells == static_cast<std::size_t>(correct));
  CHECK(correct == 4);
}

TEST_CASE("uniform random outputs match the closed-form expectation") {
  const Maze m = open_maze(5, {1, 3});
  const TargetSolution t = solve_target(m);
  double expected = 0.0;
  int graded = 0;
  for (std::size_t i = 0; i < m.cell_count(); ++i) {
    const Cell c = m.cell(i);
    if (c == m.goal()) continue;
    int in_grid = 0;
    for (Direction d : kDirections) in_grid += m.in_bounds(step(c, d));
    expected += static_cast<double>(good_directions(t, c).size()) / in_grid;
    ++graded;
  }
  expected /= graded;
  Rng rng(77);
  double total = 0.0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) total += score(testutil::uniform_values(25, rng), m, t).correctness;
  CHECK(std::abs(total / seeds - expected) < 0.02);
}

TEST_CASE("score properties on random outputs") {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Maze m = generate_maze(6 + trial % 5, 0.2, static_cast<std::uint64_t>(trial));
    const TargetSolution t = solve_target(m);
    const auto out = testutil::uniform_values(m.cell_count(), rng, -1.0, 1.0);
    const ScoreReport r = score(out, m, t, true);
    CHECK(r.correctness >= r.goodness);
    CHECK(r.goodness >= 0.0);
    CHECK(r.correctness <= 1.0);
    if (r.goodness == 1.0) CHECK(r.correctness == 1.0);
    std::vector<double> scaled(out);
    for (double& v : scaled) v = 3.5 * v + 0.25;
    const ScoreReport s = score(scaled, m, t);
    CHECK(s.goodness == r.goodness);
    CHECK(s.correctness == r.correctness);
    for (const auto& g : r.per_cell) {
      CHECK(g.is_good == (g.predicted == g.canonical));
      CHECK(g.is_correct == g.good.contains(g.predicted));
    }
  }
}

TEST_CASE("score errors") {
  const Maze sealed = parse_maze("G#\n##\n");
  const std::vector<double> out(4, 0.0);
  CHECK_THROWS_AS(score(out, sealed, solve_target(sealed)), DomainError);
  const Maze m = open_maze(3, {0, 0});
  CHECK_THROWS_AS(score(out, m, solve_target(m)), ArgumentError);
}

TEST_CASE("batch_score") {
  ScoreReport a;
  a.goodness = 0.4;
  a.correctness = 0.7;
  ScoreReport b;
  b.goodness = 0.6;
  b.correctness = 0.9;
  const std::vector<ScoreReport> one = {a};
  CHECK(batch_score(one).goodness == 0.4);
  CHECK(batch_score(one).correctness == 0.7);
  const std::vector<ScoreReport> two = {a, b};
  CHECK(batch_score(two).goodness == doctest::Approx(0.5));
  CHECK(batch_score(two).correctness == doctest::Approx(0.8));
  CHECK_THROWS_AS(batch_score(std::vector<ScoreReport>{}), ArgumentError);
}

TEST_CASE("pooled reports weight every cell equally") {
  ScoreReport a;
  a.graded_cells = 10;
  a.good_cells = 2;
  a.correct_cells = 5;
  ScoreReport b;
  b.graded_cells = 30;
  b.good_cells = 18;
  b.correct_cells = 27;
  const std::vector<ScoreReport> parts = {a, b};
  const ScoreReport p = pool_reports(parts);
  CHECK(p.graded_cells == 40);
  CHECK(p.goodness == doctest::Approx(0.5));
  CHECK(p.correctness == doctest::Approx(0.8));
}

TEST_CASE("per-cell CSV") {
  const Maze fig = testutil::figure6_maze();
  const TargetSolution t = solve_target(fig);
  std::ostringstream os;
  write_cell_csv(os, score(target_outputs(fig, t), fig, t, true));
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "row,col,predicted,canonical,good_set,is_good,is_correct");
  int rows = 0;
  bool saw_pair = false;
  while (std::getline(is, line)) {
    ++rows;
    if (line.rfind("1,1,", 0) == 0) {
      CHECK(line == "1,1,down,down,down|right,1,1");
      saw_pair = true;
    }
  }
  CHECK(rows == 18);
  CHECK(saw_pair);
}
