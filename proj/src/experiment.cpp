#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mazenet/error.hpp"
#include "mazenet/experiment.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

std::uint64_t set_seed(std::uint64_t master_seed, int set_index) {
  return derive_seed(master_seed, "set", static_cast<std::uint64_t>(set_index));
}

MazeSet make_maze_set(const ExperimentConfig& config, int set_index) {
  const std::uint64_t seed = set_seed(config.master_seed, set_index);
  MazeSet out;
  for (int i = 0; i < config.train_count; ++i)
    out.train.push_back(generate_maze(config.maze_n, config.obstacle_fraction,
                                      derive_seed(seed, "train", static_cast<std::uint64_t>(i))));
  for (int i = 0; i < config.test_count; ++i)
    out.test.push_back(generate_maze(config.maze_n, config.obstacle_fraction,
                                     derive_seed(seed, "test", static_cast<std::uint64_t>(i))));
  return out;
}

std::vector<Maze> generate_mazes(int n, int count, double obstacle_fraction, std::uint64_t seed) {
  if (count < 1) throw ArgumentError("generate_mazes: count must be positive");
  std::vector<Maze> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out.push_back(generate_maze(n, obstacle_fraction, derive_seed(seed, "gen", static_cast<std::uint64_t>(i))));
  return out;
}

BatchResult run_batch(const ExperimentConfig& config) {
  config.validate();
  const int sets = config.batch_sets;
  const int methods = static_cast<int>(config.methods.size());
  const int jobs = sets * methods;
  std::vector<BatchRow> rows(static_cast<std::size_t>(jobs));

  // Job j covers method j / sets and set j % sets. Each job owns its seeds,
  // so the schedule does not affect the results.
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < jobs; ++j) {
    BatchRow& row = rows[static_cast<std::size_t>(j)];
    row.method = config.methods[static_cast<std::size_t>(j / sets)];
    row.set_index = j % sets;
    try {
      const MazeSet mazes = make_maze_set(config, row.set_index);
      TrainingConfig training = config.training;
      training.seed = derive_seed(set_seed(config.master_seed, row.set_index), "train-run");
      const TrainResult trained = train(mazes.train, row.method, training);
      const Evaluation eval = evaluate(trained, mazes.test, training);
      row.goodness = eval.mean.goodness;
      row.correctness = eval.mean.correctness;
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
  }

  BatchResult result;
  result.rows = std::move(rows);
  result.aggregates = aggregate_rows(result.rows, config.methods);
  return result;
}

std::vector<BatchAggregate> aggregate_rows(const std::vector<BatchRow>& rows,
                                           const std::vector<Method>& methods) {
  std::vector<BatchAggregate> out;
  for (Method m : methods) {
    BatchAggregate agg;
    agg.method = m;
    double sum_g = 0.0;
    double sum_c = 0.0;
    for (const auto& r : rows) {
      if (r.method != m) continue;
      if (r.failed) {
        ++agg.failed_sets;
        continue;
      }
      ++agg.ok_sets;
      sum_g += r.goodness;
      sum_c += r.correctness;
    }
    if (agg.ok_sets > 0) {
      agg.mean_goodness = sum_g / agg.ok_sets;
      agg.mean_correctness = sum_c / agg.ok_sets;
    }
    if (agg.ok_sets > 1) {
      double ss_g = 0.0;
      double ss_c = 0.0;
      for (const auto& r : rows) {
        if (r.method != m || r.failed) continue;
        ss_g += (r.goodness - agg.mean_goodness) * (r.goodness - agg.mean_goodness);
        ss_c += (r.correctness - agg.mean_correctness) * (r.correctness - agg.mean_correctness);
      }
      agg.sd_goodness = std::sqrt(ss_g / (agg.ok_sets - 1));
      agg.sd_correctness = std::sqrt(ss_c / (agg.ok_sets - 1));
    }
    out.push_back(agg);
  }
  return out;
}

void write_batch_csv(std::ostream& os, const BatchResult& result, const ExperimentConfig& config) {
  const auto old = os.precision(std::numeric_limits<double>::max_digits10);
  const TrainingConfig& t = config.training;
  os << "# mazenet batch seed=" << config.master_seed << " n=" << config.maze_n
     << " sets=" << config.batch_sets << " train=" << config.train_count
     << " test=" << config.test_count << " obstacle_fraction=" << config.obstacle_fraction
     << " epochs=" << t.epochs << " r=" << t.R << " k0=" << t.k0_scale
     << " cluster_k=" << t.cluster_k << " submaze_m=" << t.submaze_m << '\n';
  os << "set,method,status,goodness,correctness,goodness_sd,correctness_sd\n";
  for (const auto& r : result.rows) {
    os << r.set_index << ',' << to_string(r.method) << ',';
    if (r.failed)
      os << "failed,,,,\n";
    else
      os << "ok," << r.goodness << ',' << r.correctness << ",,\n";
  }
  for (const auto& a : result.aggregates) {
    os << "all," << to_string(a.method) << ",failed=" << a.failed_sets << ',';
    if (a.ok_sets > 0)
      os << a.mean_goodness << ',' << a.mean_correctness << ',' << a.sd_goodness << ','
         << a.sd_correctness << '\n';
    else
      os << ",,,\n";
  }
  os.precision(old);
}

void write_cluster_csv(std::ostream& os, const Maze& maze, const ClusterModel& sorted) {
  if (sorted.assignment.size() != maze.cell_count() || sorted.sorted_label.size() != maze.cell_count())
    throw ArgumentError("write_cluster_csv: model does not cover the maze (sort it first)");
  os << "cell_row,cell_col,assignment,sorted_label\n";
  for (std::size_t i = 0; i < maze.cell_count(); ++i) {
    const Cell c = maze.cell(i);
    os << c.row << ',' << c.col << ',' << sorted.assignment[i] << ',' << sorted.sorted_label[i] << '\n';
  }
}

}  // namespace mazenet
