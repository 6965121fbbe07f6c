#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mazenet/csrn.hpp"
#include "mazenet/ekf.hpp"
#include "mazenet/maze.hpp"
#include "mazenet/method.hpp"
#include "mazenet/metrics.hpp"

namespace mazenet {

// Epochs (1-based) at which clustering during epochs recomputes the
// auxiliary input. Tens: 4, 10, 20, 30, ...  Offset: 4, 14, 24, ...
enum class ReclusterSchedule { Tens, Offset };

bool is_recluster_epoch(int epoch, ReclusterSchedule schedule) noexcept;

struct TrainingConfig {
  int epochs = 50;
  double R = 1.0;
  double k0_scale = 1.0;  // K(0) = k0_scale * I
  double process_noise = 0.0;
  GainMode gain_mode = GainMode::LinearSolve;
  int n_recurrent = 5;
  int core_iterations = 0;  // 0 selects 2n
  double fd_step = 1e-5;
  // One Kalman update per maze instead of one per epoch over the pooled batch.
  bool per_maze_updates = false;
  ReclusterSchedule schedule = ReclusterSchedule::Tens;
  int cluster_k = 24;
  int submaze_m = 4;
  // Obstacle cells are measured against this normalized target so that the
  // network learns to keep them out of the lowest-neighbor choice.
  bool train_obstacles = true;
  double obstacle_target = 1.0;
  std::uint64_t seed = 0;
  // Compute the gain in both modes at every update and record the difference.
  bool track_gain_equivalence = false;
  bool parallel = true;
};

struct EpochRecord {
  int epoch = 0;
  double goodness = 0.0;
  double correctness = 0.0;
  double mean_abs_innovation = 0.0;
  double gain_ms = 0.0;
  double jacobian_ms = 0.0;
  bool reclustered = false;
  double gain_sse = 0.0;           // only with track_gain_equivalence
  double gain_max_rel_diff = 0.0;  // only with track_gain_equivalence
};

struct EpochHistory {
  std::vector<EpochRecord> epochs;
  double total_gain_sse = 0.0;
  double max_gain_rel_diff = 0.0;
};

struct TrainResult {
  Method method = Method::None;
  CsrnConfig network;
  WeightSet weights;
  EpochHistory history;
};

CsrnConfig network_config_for(Method method, const TrainingConfig& config);

// Normalized targets (steps / 2n) over goal-reachable Path cells and the
// goal, plus obstacle cells at `obstacle_target` when given.
MeasurementSet measurement_set(const Maze& maze, const TargetSolution& target, InputGrid inputs,
                               std::optional<double> obstacle_target = std::nullopt);

// Each epoch: optional reclustering, forward pass and Jacobian over the
// training mazes, then the Kalman update. The per-epoch scores are measured
// on the training mazes before that epoch's update. Submaze training pools
// the tiles of every maze.
TrainResult train(std::span<const Maze> mazes, Method method, const TrainingConfig& config);

struct Evaluation {
  std::vector<ScoreReport> per_maze;  // submaze: tiles pooled per maze
  BatchScore mean;
};

// Scores trained weights on mazes, building each maze's auxiliary input
// from that maze alone.
Evaluation evaluate(const TrainResult& trained, std::span<const Maze> mazes,
                    const TrainingConfig& config);

// Network outputs for one maze under the trained method (not for submaze).
std::vector<double> predict(const TrainResult& trained, const Maze& maze,
                            const TrainingConfig& config, std::uint64_t maze_seed);

// epoch,goodness,correctness,mean_abs_innovation,gain_ms,jacobian_ms
void write_history_csv(std::ostream& os, const EpochHistory& history);

// History CSV preceded by a '#' comment naming the method and seed, without
// timing columns, so identical runs produce identical files.
void emit_curves(const EpochHistory& history, Method method, std::uint64_t seed,
                 const std::string& path);

}  // namespace mazenet
