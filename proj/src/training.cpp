#include "mazenet/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mazenet/clustering.hpp"
#include "mazenet/error.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// One training example: a maze (or tile) with its target.
struct Example {
  Maze maze;
  TargetSolution target;
};

std::vector<Example> training_examples(std::span<const Maze> mazes, Method method, int submaze_m) {
  std::vector<Example> out;
  for (const Maze& maze : mazes) {
    if (method == Method::Submaze) {
      for (auto& tile : partition_submazes(maze, submaze_m).tiles) {
        TargetSolution target = solve_target(tile.maze);
        out.push_back({std::move(tile.maze), std::move(target)});
      }
    } else {
      out.push_back({maze, solve_target(maze)});
    }
  }
  return out;
}

bool has_graded_cells(const Maze& maze, const TargetSolution& target) {
  for (std::size_t i = 0; i < maze.cell_count(); ++i)
    if (maze.cells()[i] == CellKind::Path && target.reached(maze.cell(i))) return true;
  return false;
}

ClusterInputOptions cluster_options(const TrainingConfig& config, std::uint64_t seed) {
  ClusterInputOptions o;
  o.k = config.cluster_k;
  o.seed = seed;
  return o;
}

InputGrid inputs_with_aux(const Maze& maze, Method method, const std::vector<double>& aux) {
  if (method == Method::Cluster || method == Method::ClusterDuringEpochs)
    return assemble_external_inputs(maze, method, std::span<const double>(aux));
  return assemble_external_inputs(maze, method);
}

void validate(const TrainingConfig& config, std::span<const Maze> mazes) {
  if (config.epochs < 0) throw ArgumentError("train: epochs must be >= 0");
  if (!(config.R > 0.0)) throw ArgumentError("train: R must be positive");
  if (!(config.k0_scale > 0.0)) throw ArgumentError("train: K0 scale must be positive");
  if (!(config.process_noise >= 0.0)) throw ArgumentError("train: process noise must be >= 0");
  if (config.cluster_k < 1) throw ArgumentError("train: cluster_k must be >= 1");
  if (mazes.empty()) throw ArgumentError("train: no training mazes");
  for (const Maze& m : mazes)
    if (m.size() != mazes.front().size()) throw ArgumentError("train: mazes differ in size");
}

}  // namespace

bool is_recluster_epoch(int epoch, ReclusterSchedule schedule) noexcept {
  if (epoch == 4) return true;
  if (schedule == ReclusterSchedule::Tens) return epoch >= 10 && epoch % 10 == 0;
  return epoch > 4 && (epoch - 4) % 10 == 0;
}

CsrnConfig network_config_for(Method method, const TrainingConfig& config) {
  CsrnConfig net;
  net.n_external = external_inputs_for(method);
  net.n_recurrent = config.n_recurrent;
  net.core_iterations = config.core_iterations;
  net.validate();
  return net;
}

MeasurementSet measurement_set(const Maze& maze, const TargetSolution& target, InputGrid inputs,
                               std::optional<double> obstacle_target) {
  MeasurementSet set;
  set.inputs = std::move(inputs);
  const double scale = 2.0 * maze.size();
  for (std::size_t i = 0; i < maze.cell_count(); ++i) {
    const Cell c = maze.cell(i);
    if (maze.at(c) == CellKind::Obstacle) {
      if (obstacle_target) {
        set.cells.push_back(i);
        set.targets.push_back(*obstacle_target);
      }
      continue;
    }
    const auto s = target.steps(c);
    if (!s) continue;
    set.cells.push_back(i);
    set.targets.push_back(*s / scale);
  }
  return set;
}

TrainResult train(std::span<const Maze> mazes, Method method, const TrainingConfig& config) {
  validate(config, mazes);
  if (method == Method::Submaze && mazes.front().size() % config.submaze_m != 0)
    throw ArgumentError("train: submaze side " + std::to_string(config.submaze_m) +
                        " does not divide maze side " + std::to_string(mazes.front().size()));

  TrainResult result;
  result.method = method;
  result.network = network_config_for(method, config);
  result.weights = init_weights(result.network, derive_seed(config.seed, "weights"));
  if (config.epochs == 0) return result;

  const std::vector<Example> examples = training_examples(mazes, method, config.submaze_m);
  const std::optional<double> obstacle_target =
      config.train_obstacles ? std::optional<double>(config.obstacle_target) : std::nullopt;
  const std::size_t count = examples.size();

  // Per-example auxiliary input; clustering during epochs starts from zeros.
  std::vector<std::vector<double>> aux(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (method == Method::Cluster)
      aux[i] = cluster_input_for(examples[i].maze, examples[i].target,
                                 cluster_options(config, derive_seed(config.seed, "cluster", i)));
    else if (method == Method::ClusterDuringEpochs)
      aux[i].assign(examples[i].maze.cell_count(), 0.0);
  }

  std::vector<MeasurementSet> sets;
  sets.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    sets.push_back(measurement_set(examples[i].maze, examples[i].target,
                                   inputs_with_aux(examples[i].maze, method, aux[i]), obstacle_target));

  JacobianOptions jac;
  jac.step = config.fd_step;
  jac.parallel = config.parallel;

  KalmanState kalman = KalmanState::init(result.weights, config.k0_scale, config.R, config.process_noise);
  std::vector<std::vector<double>> last_outputs;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;

    if (method == Method::ClusterDuringEpochs && !last_outputs.empty() &&
        is_recluster_epoch(epoch, config.schedule)) {
      for (std::size_t i = 0; i < count; ++i) {
        aux[i] = dynamic_cluster_input_for(
            examples[i].maze, last_outputs[i],
            cluster_options(config, derive_seed(config.seed, "recluster",
                                                static_cast<std::uint64_t>(epoch) * 4096 + i)));
        sets[i].inputs = inputs_with_aux(examples[i].maze, method, aux[i]);
      }
      rec.reclustered = true;
    }

    try {
      std::vector<std::vector<double>> outputs(count);
      double abs_sum = 0.0;
      Eigen::Index rows = 0;

      auto update = [&](std::span<const MeasurementSet> chunk, std::size_t first) {
        auto t0 = Clock::now();
        JacobianBatch batch = compute_jacobian(kalman.weights(result.network), chunk,
                                               result.network, jac);
        rec.jacobian_ms += ms_since(t0);
        for (std::size_t k = 0; k < chunk.size(); ++k)
          outputs[first + k] = std::move(batch.base_outputs[k]);
        abs_sum += batch.alpha.cwiseAbs().sum();
        rows += batch.alpha.size();

        t0 = Clock::now();
        GainWorkspace gain = kalman_gain(kalman.K, batch.C, kalman.R, config.gain_mode);
        rec.gain_ms += ms_since(t0);
        if (config.track_gain_equivalence) {
          const GainMode other = config.gain_mode == GainMode::LinearSolve ? GainMode::NaiveInverse
                                                                           : GainMode::LinearSolve;
          const auto cmp = compare_gains(gain.G, kalman_gain(kalman.K, batch.C, kalman.R, other).G);
          rec.gain_sse += cmp.sse;
          rec.gain_max_rel_diff = std::max(rec.gain_max_rel_diff, cmp.max_rel_diff);
        }
        kalman = kalman_step(kalman, batch.C, batch.alpha, gain);
      };

      if (config.per_maze_updates) {
        for (std::size_t i = 0; i < count; ++i) update(std::span<const MeasurementSet>(&sets[i], 1), i);
      } else {
        update(sets, 0);
      }

      rec.mean_abs_innovation = rows > 0 ? abs_sum / static_cast<double>(rows) : 0.0;
      if (!std::isfinite(rec.mean_abs_innovation))
        throw NumericError("non-finite training loss");

      std::vector<ScoreReport> reports;
      for (std::size_t i = 0; i < count; ++i)
        if (has_graded_cells(examples[i].maze, examples[i].target))
          reports.push_back(score(outputs[i], examples[i].maze, examples[i].target));
      if (method == Method::Submaze) {
        const auto pooled = pool_reports(reports);
        rec.goodness = pooled.goodness;
        rec.correctness = pooled.correctness;
      } else {
        const auto mean = batch_score(reports);
        rec.goodness = mean.goodness;
        rec.correctness = mean.correctness;
      }
      last_outputs = std::move(outputs);
    } catch (const NumericError& e) {
      throw NumericError("training epoch " + std::to_string(epoch) + ": " + e.what());
    }

    result.history.total_gain_sse += rec.gain_sse;
    result.history.max_gain_rel_diff = std::max(result.history.max_gain_rel_diff, rec.gain_max_rel_diff);
    result.history.epochs.push_back(rec);
  }
  result.weights = kalman.weights(result.network);
  return result;
}

std::vector<double> predict(const TrainResult& trained, const Maze& maze,
                            const TrainingConfig& config, std::uint64_t maze_seed) {
  const Method method = trained.method;
  if (method == Method::Submaze)
    throw ArgumentError("predict: submaze networks run per tile; use evaluate");
  if (method == Method::Cluster) {
    const auto aux = cluster_input_for(maze, solve_target(maze), cluster_options(config, maze_seed));
    return forward(inputs_with_aux(maze, method, aux), trained.weights, trained.network).outputs;
  }
  if (method == Method::ClusterDuringEpochs) {
    // Start without cluster information, as training does, then cluster the
    // resulting outputs and run again with the labels.
    const std::vector<double> zeros(maze.cell_count(), 0.0);
    const auto first = forward(inputs_with_aux(maze, method, zeros), trained.weights, trained.network);
    const auto aux = dynamic_cluster_input_for(maze, first.outputs, cluster_options(config, maze_seed));
    return forward(inputs_with_aux(maze, method, aux), trained.weights, trained.network).outputs;
  }
  return forward(assemble_external_inputs(maze, method), trained.weights, trained.network).outputs;
}

Evaluation evaluate(const TrainResult& trained, std::span<const Maze> mazes,
                    const TrainingConfig& config) {
  if (mazes.empty()) throw ArgumentError("evaluate: no mazes");
  Evaluation out;
  for (std::size_t i = 0; i < mazes.size(); ++i) {
    const Maze& maze = mazes[i];
    const std::uint64_t maze_seed = derive_seed(config.seed, "eval", i);
    if (trained.method == Method::Submaze) {
      std::vector<ScoreReport> tiles;
      for (const auto& tile : partition_submazes(maze, config.submaze_m).tiles) {
        const TargetSolution target = solve_target(tile.maze);
        if (!has_graded_cells(tile.maze, target)) continue;
        const auto state = forward(assemble_external_inputs(tile.maze, Method::Submaze),
                                   trained.weights, trained.network);
        tiles.push_back(score(state, tile.maze, target));
      }
      out.per_maze.push_back(pool_reports(tiles));
    } else {
      out.per_maze.push_back(score(predict(trained, maze, config, maze_seed), maze, solve_target(maze)));
    }
  }
  out.mean = batch_score(out.per_maze);
  return out;
}

void write_history_csv(std::ostream& os, const EpochHistory& history) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  os << "epoch,goodness,correctness,mean_abs_innovation,gain_ms,jacobian_ms\n";
  for (const auto& r : history.epochs)
    os << r.epoch << ',' << r.goodness << ',' << r.correctness << ',' << r.mean_abs_innovation << ','
       << r.gain_ms << ',' << r.jacobian_ms << '\n';
  os.precision(old);
}

void emit_curves(const EpochHistory& history, Method method, std::uint64_t seed,
                 const std::string& path) {
  if (history.epochs.empty()) throw ArgumentError("emit_curves: empty history");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("emit_curves: cannot open '" + path + "' for writing");
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  os << "# method=" << to_string(method) << " seed=" << seed << '\n';
  os << "epoch,goodness,correctness,mean_abs_innovation\n";
  for (const auto& r : history.epochs)
    os << r.epoch << ',' << r.goodness << ',' << r.correctness << ',' << r.mean_abs_innovation << '\n';
  if (!os) throw std::runtime_error("emit_curves: write to '" + path + "' failed");
}

}  // namespace mazenet
