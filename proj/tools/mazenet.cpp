// mazenet: maze generation, CSRN training and evaluation, batch method
// comparison, gain-mode benchmark and cluster inspection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mazenet/clustering.hpp"
#include "mazenet/error.hpp"
#include "mazenet/experiment.hpp"
#include "mazenet/metrics.hpp"
#include "mazenet/rng.hpp"
#include "mazenet/training.hpp"

namespace fs = std::filesystem;
using namespace mazenet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

// Marks a failure in command-line or config-file usage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Experiment settings shared by the subcommands. Each is kept as text and
// applied after the config file so that the command line wins.
const std::vector<std::pair<std::string, std::string>> kSettings = {
    {"n", "Maze side length"},
    {"train-count", "Training mazes per set"},
    {"test-count", "Test mazes per set"},
    {"obstacle-fraction", "Obstacle probability per non-goal cell"},
    {"method", "none|cluster|cluster_during_epochs|submaze|euclidean, comma list or 'all'"},
    {"sets", "Batch sets"},
    {"seed", "Master seed"},
    {"epochs", "Training epochs"},
    {"r", "Measurement noise R"},
    {"k0", "Initial covariance scale K0"},
    {"process-noise", "Process noise Q added to K after each update"},
    {"gain-mode", "solve|inverse"},
    {"core-iterations", "Recurrent core iterations (0 = 2n)"},
    {"recurrent", "Recurrent nodes per cell"},
    {"fd-step", "Finite-difference step for the Jacobian"},
    {"per-maze-updates", "One Kalman update per maze (true/false)"},
    {"schedule", "Reclustering schedule: tens (4,10,20,..) or offset (4,14,24,..)"},
    {"cluster-k", "Cluster count"},
    {"submaze-m", "Submaze side length"},
    {"train-obstacles", "Measure obstacle cells against obstacle-target (true/false)"},
    {"obstacle-target", "Normalized training target for obstacle cells"},
};

struct SettingFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;

  void attach(CLI::App* app, std::initializer_list<const char*> names) {
    app->add_option("--config", config_path, "Flat 'key = value' settings file")->check(CLI::ExistingFile);
    for (const char* name : names) {
      for (const auto& [key, help] : kSettings) {
        if (key != name) continue;
        options[key] = app->add_option("--" + key, values[key], help);
      }
    }
  }

  ExperimentConfig resolve(ExperimentConfig config) const {
    try {
      if (!config_path.empty())
        for (const auto& [key, value] : load_config_file(config_path)) apply_setting(config, key, value);
      for (const auto& [key, opt] : options)
        if (opt->count() > 0) apply_setting(config, key, values.at(key));
    } catch (const ArgumentError& e) {
      throw UsageError(e.what());
    } catch (const ParseError& e) {
      throw UsageError(std::string("config file: ") + e.what());
    }
    return config;
  }
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return os;
}

std::vector<Maze> load_mazes(const std::vector<std::string>& paths) {
  std::vector<Maze> out;
  for (const auto& p : paths) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open maze file '" + p + "'");
    try {
      out.push_back(read_maze(is));
    } catch (const ParseError& e) {
      throw std::runtime_error(p + ": " + e.what());
    }
  }
  return out;
}

std::string numbered(const std::string& stem, std::size_t i, const std::string& ext) {
  std::ostringstream os;
  os << stem << '_' << std::setw(3) << std::setfill('0') << i << ext;
  return os.str();
}

Method single_method(const ExperimentConfig& config) {
  if (config.methods.size() != 1) throw UsageError("this subcommand takes exactly one --method");
  return config.methods.front();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("invalid size list '" + text + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cellular simultaneous recurrent network maze solver with EKF training"};
  app.require_subcommand(1);

  // gen
  SettingFlags gen_flags;
  int gen_count = 5;
  std::string gen_out;
  bool gen_legacy = false;
  auto* gen = app.add_subcommand("gen", "Generate mazes and their target solutions");
  gen_flags.attach(gen, {"n", "obstacle-fraction", "seed"});
  gen->add_option("--count", gen_count, "Number of mazes")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_flag("--legacy", gen_legacy, "Also write targets with obstacles printed as 25");

  // train
  SettingFlags train_flags;
  std::vector<std::string> train_mazes;
  std::string train_out;
  auto* train_cmd = app.add_subcommand("train", "Train one network; writes weights and epoch history");
  train_flags.attach(train_cmd, {"n", "train-count", "obstacle-fraction", "method", "seed", "epochs", "r",
                                 "k0", "process-noise", "gain-mode", "core-iterations", "recurrent",
                                 "fd-step", "per-maze-updates", "schedule", "cluster-k", "submaze-m",
                                 "train-obstacles", "obstacle-target"});
  train_cmd->add_option("--mazes", train_mazes, "Training maze files (default: generated from --seed)");
  train_cmd->add_option("--out", train_out, "Output directory")->required();

  // eval
  SettingFlags eval_flags;
  std::vector<std::string> eval_mazes;
  std::string eval_weights;
  std::string eval_cells;
  auto* eval = app.add_subcommand("eval", "Score saved weights on mazes");
  eval_flags.attach(eval, {"n", "test-count", "obstacle-fraction", "method", "seed", "core-iterations",
                           "cluster-k", "submaze-m"});
  eval->add_option("--weights", eval_weights, "Weights file written by train")->required()->check(CLI::ExistingFile);
  eval->add_option("--mazes", eval_mazes, "Maze files (default: test mazes generated from --seed)");
  eval->add_option("--cells-out", eval_cells, "Directory for per-cell CSV dumps");

  // batch
  SettingFlags batch_flags;
  std::string batch_out;
  auto* batch = app.add_subcommand("batch", "Multi-set, multi-method comparison");
  batch_flags.attach(batch, {"n", "train-count", "test-count", "obstacle-fraction", "method", "sets", "seed",
                             "epochs", "r", "k0", "process-noise", "gain-mode", "core-iterations",
                             "recurrent", "fd-step", "per-maze-updates", "schedule", "cluster-k",
                             "submaze-m", "train-obstacles", "obstacle-target"});
  batch->add_option("--out", batch_out, "BatchResult CSV (default: stdout)");

  // bench
  BenchConfig bench_config;
  std::string bench_sizes;
  std::string bench_jacobian_sizes;
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "Time gain modes and Jacobian assembly modes");
  bench->add_option("--sizes", bench_sizes, "Measurement counts m for the gain rows, comma-separated");
  bench->add_option("--jacobian-sizes", bench_jacobian_sizes, "Row counts for the Jacobian assembly rows");
  bench->add_option("--p", bench_config.p, "Weight dimension")->check(CLI::PositiveNumber);
  bench->add_option("--reps", bench_config.reps, "Repetitions per mode (median reported)")->check(CLI::Range(5, 1000));
  bench->add_option("--seed", bench_config.seed, "Seed for the synthetic inputs");
  bench->add_option("--out", bench_out, "BenchResult CSV (default: stdout)");

  // cluster
  SettingFlags cluster_flags;
  std::string cluster_maze;
  std::string cluster_out;
  bool cluster_standardize = false;
  auto* cluster = app.add_subcommand("cluster", "Cluster one maze's cells and emit the sorted labels");
  cluster_flags.attach(cluster, {"n", "obstacle-fraction", "seed", "cluster-k"});
  cluster->add_option("--maze", cluster_maze, "Maze file (default: generated from --seed)");
  cluster->add_flag("--standardize", cluster_standardize, "z-score the features before clustering");
  cluster->add_option("--out", cluster_out, "CSV output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const char* stage = "setup";
  try {
    if (*gen) {
      stage = "gen";
      const ExperimentConfig config = gen_flags.resolve({});
      fs::create_directories(gen_out);
      const auto mazes = generate_mazes(config.maze_n, gen_count, config.obstacle_fraction, config.master_seed);
      for (std::size_t i = 0; i < mazes.size(); ++i) {
        auto maze_os = open_out(fs::path(gen_out) / numbered("maze", i, ".txt"));
        write_maze(maze_os, mazes[i]);
        const TargetSolution target = solve_target(mazes[i]);
        auto target_os = open_out(fs::path(gen_out) / numbered("target", i, ".txt"));
        write_target(target_os, target);
        if (gen_legacy) {
          auto legacy_os = open_out(fs::path(gen_out) / numbered("target_legacy", i, ".txt"));
          write_target(legacy_os, target, true);
        }
      }
      std::cerr << "wrote " << mazes.size() << " mazes to " << gen_out << '\n';
    } else if (*train_cmd) {
      stage = "train";
      ExperimentConfig config = train_flags.resolve({});
      const Method method = single_method(config);
      config.validate();
      std::vector<Maze> mazes = train_mazes.empty() ? make_maze_set(config, 0).train : load_mazes(train_mazes);
      TrainingConfig training = config.training;
      training.seed = config.master_seed;
      const TrainResult result = train(mazes, method, training);
      fs::create_directories(train_out);
      auto w = open_out(fs::path(train_out) / "weights.txt");
      write_weights(w, result.weights, result.network);
      auto h = open_out(fs::path(train_out) / "history.csv");
      write_history_csv(h, result.history);
      if (!result.history.epochs.empty()) {
        emit_curves(result.history, method, config.master_seed, (fs::path(train_out) / "curves.csv").string());
        const auto& last = result.history.epochs.back();
        std::cerr << "epoch " << last.epoch << ": goodness " << last.goodness << ", correctness "
                  << last.correctness << ", mean |alpha| " << last.mean_abs_innovation << '\n';
      }
    } else if (*eval) {
      stage = "eval";
      ExperimentConfig config = eval_flags.resolve({});
      const Method method = single_method(config);
      config.validate();
      std::ifstream wis(eval_weights, std::ios::binary);
      CsrnConfig base;
      base.core_iterations = config.training.core_iterations;
      auto [weights, network] = read_weights(wis, base);
      if (network.n_external != external_inputs_for(method))
        throw UsageError("weights have " + std::to_string(network.n_external) +
                         " external inputs but method " + std::string(to_string(method)) + " needs " +
                         std::to_string(external_inputs_for(method)));
      TrainResult trained{method, network, std::move(weights), {}};
      const std::vector<Maze> mazes = eval_mazes.empty() ? make_maze_set(config, 0).test : load_mazes(eval_mazes);
      TrainingConfig training = config.training;
      training.seed = config.master_seed;
      const Evaluation ev = evaluate(trained, mazes, training);
      std::cout << std::setprecision(std::numeric_limits<double>::max_digits10);
      std::cout << "maze,goodness,correctness,graded_cells\n";
      for (std::size_t i = 0; i < ev.per_maze.size(); ++i)
        std::cout << i << ',' << ev.per_maze[i].goodness << ',' << ev.per_maze[i].correctness << ','
                  << ev.per_maze[i].graded_cells << '\n';
      std::cout << "mean," << ev.mean.goodness << ',' << ev.mean.correctness << ",\n";
      if (!eval_cells.empty()) {
        if (method == Method::Submaze) throw UsageError("--cells-out is not available for submaze");
        fs::create_directories(eval_cells);
        for (std::size_t i = 0; i < mazes.size(); ++i) {
          const auto outputs = predict(trained, mazes[i], training, derive_seed(training.seed, "eval", i));
          auto os = open_out(fs::path(eval_cells) / numbered("cells", i, ".csv"));
          write_cell_csv(os, score(outputs, mazes[i], solve_target(mazes[i]), true));
        }
      }
    } else if (*batch) {
      stage = "batch";
      ExperimentConfig defaults;
      defaults.methods.assign(kMethods.begin(), kMethods.end());
      const ExperimentConfig config = batch_flags.resolve(defaults);
      try {
        config.validate();
      } catch (const ArgumentError& e) {
        throw UsageError(e.what());
      }
      const BatchResult result = run_batch(config);
      if (batch_out.empty()) {
        write_batch_csv(std::cout, result, config);
      } else {
        auto os = open_out(batch_out);
        write_batch_csv(os, result, config);
      }
      for (const auto& row : result.rows)
        if (row.failed)
          std::cerr << "warning: set " << row.set_index << " (" << to_string(row.method)
                    << ") failed: " << row.error << '\n';
      for (const auto& a : result.aggregates)
        std::cerr << to_string(a.method) << ": correctness " << a.mean_correctness << ", goodness "
                  << a.mean_goodness << " over " << a.ok_sets << " sets (" << a.failed_sets << " failed)\n";
    } else if (*bench) {
      stage = "bench";
      if (!bench_sizes.empty() || !bench_jacobian_sizes.empty()) {
        bench_config.gain_sizes = bench_sizes.empty() ? std::vector<int>{} : parse_int_list(bench_sizes);
        bench_config.jacobian_sizes =
            bench_jacobian_sizes.empty() ? std::vector<int>{} : parse_int_list(bench_jacobian_sizes);
      }
      const auto rows = run_bench(bench_config);
      if (bench_out.empty()) {
        write_bench_csv(std::cout, rows);
      } else {
        auto os = open_out(bench_out);
        write_bench_csv(os, rows);
      }
    } else if (*cluster) {
      stage = "cluster";
      const ExperimentConfig config = cluster_flags.resolve({});
      Maze maze = cluster_maze.empty()
                      ? generate_maze(config.maze_n, config.obstacle_fraction, derive_seed(config.master_seed, "gen", 0))
                      : load_mazes({cluster_maze}).front();
      auto features = static_features(maze, solve_target(maze));
      if (cluster_standardize) standardize(features);
      ClusterModel model = sort_clusters(
          kmeans(features, config.training.cluster_k, derive_seed(config.master_seed, "cluster")), maze.goal());
      if (cluster_out.empty()) {
        write_cluster_csv(std::cout, maze, model);
      } else {
        auto os = open_out(cluster_out);
        write_cluster_csv(os, maze, model);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error in " << stage << ": " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
