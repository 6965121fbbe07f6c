#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mazenet/clustering.hpp"
#include "mazenet/ekf.hpp"
#include "mazenet/maze.hpp"
#include "mazenet/method.hpp"
#include "mazenet/training.hpp"

namespace mazenet {

struct ExperimentConfig {
  int maze_n = 12;
  int train_count = 5;
  int test_count = 5;
  double obstacle_fraction = 0.15;
  std::vector<Method> methods = {Method::None};
  int batch_sets = 100;
  std::uint64_t master_seed = 0;
  TrainingConfig training;  // also carries cluster_k and submaze_m

  // Throws ArgumentError on invalid counts or method-specific fields.
  void validate() const;
};

// Applies one `key = value` setting. Keys match the CLI flag names without
// the leading dashes; '_' and '-' are interchangeable.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

// Flat `key = value` lines; '#' starts a comment. Returned in file order.
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text);
std::vector<std::pair<std::string, std::string>> load_config_file(const std::filesystem::path& path);

std::vector<Method> parse_method_list(std::string_view text);

// Mazes of one set. Train and test draw from disjoint seed streams.
struct MazeSet {
  std::vector<Maze> train;
  std::vector<Maze> test;
};
MazeSet make_maze_set(const ExperimentConfig& config, int set_index);
std::uint64_t set_seed(std::uint64_t master_seed, int set_index);

// Mazes for `gen`: maze i uses derive_seed(seed, "gen", i).
std::vector<Maze> generate_mazes(int n, int count, double obstacle_fraction, std::uint64_t seed);

struct BatchRow {
  int set_index = 0;
  Method method = Method::None;
  bool failed = false;
  std::string error;
  double goodness = 0.0;
  double correctness = 0.0;
};

struct BatchAggregate {
  Method method = Method::None;
  int ok_sets = 0;
  int failed_sets = 0;
  double mean_goodness = 0.0;
  double mean_correctness = 0.0;
  double sd_goodness = 0.0;
  double sd_correctness = 0.0;
};

struct BatchResult {
  std::vector<BatchRow> rows;  // sorted by (method order, set index)
  std::vector<BatchAggregate> aggregates;
};

// For every set and method: fresh mazes, one training run, scored on the
// set's test mazes. Sets run in parallel; a set that throws is recorded as
// failed and left out of the aggregates.
BatchResult run_batch(const ExperimentConfig& config);

// Means and sample standard deviations over the successful rows.
std::vector<BatchAggregate> aggregate_rows(const std::vector<BatchRow>& rows,
                                           const std::vector<Method>& methods);

// set,method,status,goodness,correctness,goodness_sd,correctness_sd. Data
// rows first, then one `all` row per method.
void write_batch_csv(std::ostream& os, const BatchResult& result, const ExperimentConfig& config);

enum class BenchKernel { Gain, JacobianAssembly };

struct BenchRow {
  BenchKernel kernel = BenchKernel::Gain;
  int m = 0;
  int p = 0;
  std::string mode;
  int reps = 0;
  double median_ms = 0.0;
  double speedup = 0.0;  // slow-mode median / fast-mode median, same for both rows
};

struct BenchConfig {
  std::vector<int> gain_sizes = {100, 500, 720};
  std::vector<int> jacobian_sizes = {1000};
  int p = 60;
  int reps = 5;
  std::uint64_t seed = 0;
};

// Seeded well-conditioned inputs for timing.
Eigen::MatrixXd bench_covariance(int p, std::uint64_t seed);
Eigen::MatrixXd bench_jacobian(int m, int p, std::uint64_t seed);

std::vector<BenchRow> run_bench(const BenchConfig& config);

// kernel,m,p,mode,reps,median_ms,speedup
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

// cell_row,cell_col,assignment,sorted_label
void write_cluster_csv(std::ostream& os, const Maze& maze, const ClusterModel& sorted);

}  // namespace mazenet
