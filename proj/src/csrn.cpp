#include "mazenet/csrn.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "mazenet/error.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

namespace {

constexpr double kInitRange = 0.3;

double offgrid_value(OffGrid mode) noexcept { return mode == OffGrid::Wall ? 1.0 : 0.0; }

void check_shapes(const InputGrid& inputs, const WeightSet& weights, const CsrnConfig& config) {
  config.validate();
  if (!weights.matches(config))
    throw ArgumentError("forward: weight matrix is " + std::to_string(weights.rows()) + "x" +
                        std::to_string(weights.cols()) + ", config needs " +
                        std::to_string(config.n_recurrent) + "x" + std::to_string(config.input_width()));
  if (inputs.n < 1) throw ArgumentError("forward: empty input grid");
  if (inputs.width != config.n_external)
    throw ArgumentError("forward: input width " + std::to_string(inputs.width) +
                        " does not match n_external " + std::to_string(config.n_external));
  if (inputs.values.size() != inputs.cell_count() * static_cast<std::size_t>(inputs.width))
    throw ArgumentError("forward: input grid has the wrong number of values");
}

// Row-major neighbor table, -1 for off-grid.
std::vector<int> neighbor_table(int n) {
  std::vector<int> nb(static_cast<std::size_t>(n) * static_cast<std::size_t>(n) * 4);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const std::size_t base = (static_cast<std::size_t>(r) * static_cast<std::size_t>(n) +
                                static_cast<std::size_t>(c)) * 4;
      for (Direction d : kDirections) {
        const Cell s = step({r, c}, d);
        const bool inside = s.row >= 0 && s.col >= 0 && s.row < n && s.col < n;
        nb[base + static_cast<std::size_t>(d)] = inside ? s.row * n + s.col : -1;
      }
    }
  }
  return nb;
}

template <bool Parallel>
NetworkState forward_kernel(const InputGrid& inputs, const WeightSet& weights,
                            const CsrnConfig& config) {
  check_shapes(inputs, weights, config);
  const int n = inputs.n;
  const int cells = n * n;
  const int n_ext = config.n_external;
  const int n_rec = config.n_recurrent;
  const int width = config.input_width();
  const int out_node = config.output_node;
  const bool use_tanh = config.activation == Activation::Tanh;
  const double edge = offgrid_value(config.off_grid);
  const int iterations = config.iterations_for(n);

  const std::vector<int> nb = neighbor_table(n);
  const double* W = weights.flat().data();
  const double* ext = inputs.values.data();

  std::vector<double> z(static_cast<std::size_t>(cells) * static_cast<std::size_t>(n_rec), 0.0);
  std::vector<double> z_next(z.size());
  std::vector<double> y(static_cast<std::size_t>(cells), 0.0);
  std::vector<double> y_next(y.size());

  NetworkState state;
  state.n = n;
  state.n_recurrent = n_rec;
  if (iterations > 1) state.iteration_deltas.reserve(static_cast<std::size_t>(iterations - 1));

  for (int t = 0; t < iterations; ++t) {
#pragma omp parallel for schedule(static) if (Parallel)
    for (int i = 0; i < cells; ++i) {
      const double* e = ext + static_cast<std::ptrdiff_t>(i) * n_ext;
      const double* zi = z.data() + static_cast<std::ptrdiff_t>(i) * n_rec;
      const int* nbi = nb.data() + static_cast<std::ptrdiff_t>(i) * 4;
      double neighbors[4];
      for (int d = 0; d < 4; ++d) neighbors[d] = nbi[d] >= 0 ? y[static_cast<std::size_t>(nbi[d])] : edge;
      double* zo = z_next.data() + static_cast<std::ptrdiff_t>(i) * n_rec;
      for (int k = 0; k < n_rec; ++k) {
        const double* w = W + static_cast<std::ptrdiff_t>(k) * width;
        // Summation order matches the column layout of W.
        double acc = 0.0;
        int col = 0;
        for (int a = 0; a < n_ext; ++a) acc += w[col++] * e[a];
        for (int d = 0; d < 4; ++d) acc += w[col++] * neighbors[d];
        for (int j = 0; j < n_rec; ++j) acc += w[col++] * zi[j];
        acc += w[col] * 1.0;
        zo[k] = use_tanh ? std::tanh(acc) : 1.0 / (1.0 + std::exp(-acc));
      }
      y_next[static_cast<std::size_t>(i)] = zo[out_node];
    }
    if (t > 0) {
      double delta = 0.0;
      for (int i = 0; i < cells; ++i)
        delta = std::max(delta, std::abs(y_next[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]));
      state.iteration_deltas.push_back(delta);
    }
    z.swap(z_next);
    y.swap(y_next);
  }
  state.z = std::move(z);
  state.outputs = std::move(y);
  return state;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::None:
      return "none";
    case Method::Cluster:
      return "cluster";
    case Method::ClusterDuringEpochs:
      return "cluster_during_epochs";
    case Method::Submaze:
      return "submaze";
    case Method::Euclidean:
      return "euclidean";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : kMethods)
    if (to_string(m) == name) return m;
  throw ArgumentError("unknown method '" + std::string(name) +
                      "' (expected none, cluster, cluster_during_epochs, submaze or euclidean)");
}

void CsrnConfig::validate() const {
  if (n_external < 2) throw ArgumentError("csrn: n_external must be >= 2");
  if (n_recurrent < 1) throw ArgumentError("csrn: n_recurrent must be >= 1");
  if (core_iterations < 0) throw ArgumentError("csrn: core_iterations must be >= 1 (or 0 for 2n)");
  if (output_node < 0 || output_node >= n_recurrent)
    throw ArgumentError("csrn: output_node must be < n_recurrent");
}

WeightSet::WeightSet(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows < 1 || cols < 1 ||
      values_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
    throw ArgumentError("WeightSet: " + std::to_string(values_.size()) + " values for a " +
                        std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
}

WeightSet init_weights(const CsrnConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  std::vector<double> values(static_cast<std::size_t>(config.weight_count()));
  for (auto& v : values) v = rng.uniform(-kInitRange, kInitRange);
  return {config.n_recurrent, config.input_width(), std::move(values)};
}

InputGrid assemble_external_inputs(const Maze& maze, Method method,
                                   std::optional<std::span<const double>> aux) {
  const bool wants_aux = method == Method::Cluster || method == Method::ClusterDuringEpochs;
  if (wants_aux && !aux)
    throw ArgumentError(std::string("assemble_external_inputs: method ") +
                        std::string(to_string(method)) + " needs per-cell auxiliary values");
  if (!wants_aux && aux)
    throw ArgumentError(std::string("assemble_external_inputs: method ") +
                        std::string(to_string(method)) + " takes no auxiliary values");
  if (aux && aux->size() != maze.cell_count())
    throw ArgumentError("assemble_external_inputs: auxiliary values have " +
                        std::to_string(aux->size()) + " entries for " +
                        std::to_string(maze.cell_count()) + " cells");

  InputGrid grid;
  grid.n = maze.size();
  grid.width = external_inputs_for(method);
  grid.values.reserve(maze.cell_count() * static_cast<std::size_t>(grid.width));
  const double diag = maze.size() * std::sqrt(2.0);
  for (std::size_t i = 0; i < maze.cell_count(); ++i) {
    const CellKind kind = maze.cells()[i];
    grid.values.push_back(kind == CellKind::Obstacle ? 1.0 : 0.0);
    grid.values.push_back(kind == CellKind::Goal ? 1.0 : 0.0);
    if (method == Method::Euclidean)
      grid.values.push_back(euclid_to_goal(maze, maze.cell(i)) / diag);
    else if (wants_aux)
      grid.values.push_back((*aux)[i]);
  }
  return grid;
}

NetworkState forward(const InputGrid& inputs, const WeightSet& weights, const CsrnConfig& config) {
  return forward_kernel<true>(inputs, weights, config);
}

NetworkState forward_serial(const InputGrid& inputs, const WeightSet& weights,
                            const CsrnConfig& config) {
  return forward_kernel<false>(inputs, weights, config);
}

Direction predicted_direction(std::span<const double> outputs, const Maze& maze, Cell cell) {
  if (!maze.in_bounds(cell)) throw DomainError("predicted_direction: cell outside grid");
  if (outputs.size() != maze.cell_count())
    throw ArgumentError("predicted_direction: outputs do not match maze size");
  std::optional<Direction> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (Direction d : kDirections) {
    const Cell nb = step(cell, d);
    if (!maze.in_bounds(nb)) continue;
    const double v = outputs[maze.index(nb)];
    if (!best || v < best_value) {
      best = d;
      best_value = v;
    }
  }
  if (!best) throw DomainError("predicted_direction: cell has no in-grid neighbor");
  return *best;
}

void write_weights(std::ostream& os, const WeightSet& weights, const CsrnConfig& config) {
  if (!weights.matches(config)) throw ArgumentError("write_weights: weights do not match config");
  os << config.n_external << ' ' << config.n_recurrent << '\n';
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  for (int r = 0; r < weights.rows(); ++r) {
    for (int c = 0; c < weights.cols(); ++c) {
      if (c > 0) os << ' ';
      os << weights(r, c);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

std::pair<WeightSet, CsrnConfig> read_weights(std::istream& is, CsrnConfig base) {
  if (!(is >> base.n_external >> base.n_recurrent))
    throw ParseError("weights file must start with 'n_external n_recurrent'", 1, 0);
  if (base.output_node >= base.n_recurrent) base.output_node = 0;
  base.validate();
  std::vector<double> values(static_cast<std::size_t>(base.weight_count()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(is >> values[i]))
      throw ParseError("weights file ended after " + std::to_string(i) + " of " +
                           std::to_string(values.size()) + " values",
                       2 + i / static_cast<std::size_t>(base.input_width()), 0);
    if (!std::isfinite(values[i])) throw ParseError("non-finite weight", 2, 0);
  }
  double extra;
  if (is >> extra) throw ParseError("weights file has trailing values", 0, 0);
  return {WeightSet(base.n_recurrent, base.input_width(), std::move(values)), base};
}

}  // namespace mazenet
