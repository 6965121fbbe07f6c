#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mazenet/maze.hpp"
#include "mazenet/method.hpp"

namespace mazenet {

enum class Activation { Tanh, Logistic };

// Value a cell reads for a neighbor outside the grid.
enum class OffGrid { Zero, Wall };

// Cell core: one fully connected layer of recurrent nodes fed by
// [external inputs | up, down, left, right neighbor outputs | own recurrent
// state | bias]. The cell output is one designated recurrent node.
struct CsrnConfig {
  int n_external = 2;
  int n_recurrent = 5;
  int core_iterations = 0;  // 0 selects 2 * n for an n x n grid
  Activation activation = Activation::Tanh;
  int output_node = 0;
  OffGrid off_grid = OffGrid::Zero;

  // Throws ArgumentError on an invalid combination.
  void validate() const;

  int input_width() const noexcept { return n_external + 4 + n_recurrent + 1; }
  int weight_count() const noexcept { return n_recurrent * input_width(); }
  int iterations_for(int n) const noexcept { return core_iterations > 0 ? core_iterations : 2 * n; }
};

// Shared cellular weights, n_recurrent x input_width, row-major. The last
// column is the bias.
class WeightSet {
 public:
  WeightSet() = default;
  WeightSet(int rows, int cols, std::vector<double> values);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator()(int r, int c) const { return values_[flat(r, c)]; }
  double& operator()(int r, int c) { return values_[flat(r, c)]; }
  std::span<const double> flat() const noexcept { return values_; }
  std::span<double> flat() noexcept { return values_; }

  bool matches(const CsrnConfig& config) const noexcept {
    return rows_ == config.n_recurrent && cols_ == config.input_width();
  }

  friend bool operator==(const WeightSet&, const WeightSet&) = default;

 private:
  std::size_t flat(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(c);
  }
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

// Per-cell external input vectors, row-major over cells.
struct InputGrid {
  int n = 0;
  int width = 0;
  std::vector<double> values;

  std::span<const double> cell(std::size_t index) const {
    return std::span<const double>(values).subspan(index * static_cast<std::size_t>(width),
                                                   static_cast<std::size_t>(width));
  }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  }
};

struct NetworkState {
  int n = 0;
  int n_recurrent = 0;
  std::vector<double> z;        // cell-major, n_recurrent values per cell
  std::vector<double> outputs;  // y per cell
  // max |y_{t+1} - y_t| over cells for each core iteration after the first
  std::vector<double> iteration_deltas;

  double output(Cell c) const {
    return outputs[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(c.col)];
  }
};

// Entries i.i.d. uniform on [-0.3, 0.3].
WeightSet init_weights(const CsrnConfig& config, std::uint64_t seed);

// Obstacle and goal indicators, plus the auxiliary value for methods that
// use one. Euclidean methods derive it from the maze; cluster methods take
// it from `aux`.
InputGrid assemble_external_inputs(const Maze& maze, Method method,
                                   std::optional<std::span<const double>> aux = std::nullopt);

// Synchronous core iterations starting from z = 0. Cells are updated in
// parallel; iteration t+1 reads only iteration-t state.
NetworkState forward(const InputGrid& inputs, const WeightSet& weights, const CsrnConfig& config);

// Single-threaded variant used inside already-parallel callers.
NetworkState forward_serial(const InputGrid& inputs, const WeightSet& weights,
                            const CsrnConfig& config);

namespace reference {
// Plain nested-loop implementation of the same recurrence, kept to check
// the optimized kernels against.
NetworkState forward(const InputGrid& inputs, const WeightSet& weights, const CsrnConfig& config);
}  // namespace reference

// Direction of the in-grid neighbor with the lowest output; ties go to the
// earlier direction in canonical order.
Direction predicted_direction(std::span<const double> outputs, const Maze& maze, Cell cell);

void write_weights(std::ostream& os, const WeightSet& weights, const CsrnConfig& config);
// Header gives n_external and n_recurrent; the remaining fields of `base`
// are kept.
std::pair<WeightSet, CsrnConfig> read_weights(std::istream& is, CsrnConfig base = {});

}  // namespace mazenet
