#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mazenet/maze.hpp"

namespace mazenet {

// (row, col, dir_up, dir_down, dir_left, dir_right, cell value)
using FeatureVector = std::array<double, 7>;

struct ClusterModel {
  int k = 0;
  std::vector<FeatureVector> centroids;
  std::vector<int> assignment;    // per point, in [0, k)
  std::vector<int> sorted_label;  // per point, rank after sort_clusters; empty before
  std::vector<int> rank;          // per cluster, rank after sort_clusters; empty before
  int iterations_run = 0;
  std::vector<double> objective;  // within-cluster scatter after each assignment pass
};

// Direction flags are +1 when one step that way strictly reduces the
// Euclidean distance to the goal, -1 otherwise (including off-grid). The last
// component is 0 for Path, 1 for Obstacle, -1 for Goal.
std::vector<FeatureVector> static_features(const Maze& maze, const TargetSolution& target);

// Direction components carry the neighbors' previous-epoch outputs (0 off
// grid) and the last component the cell's own output.
std::vector<FeatureVector> dynamic_features(const Maze& maze, std::span<const double> cell_outputs);

// Per-component z-score in place; constant components are left centered.
void standardize(std::vector<FeatureVector>& points);

double squared_distance(const FeatureVector& a, const FeatureVector& b) noexcept;

// Lloyd's algorithm. Initial centroids are k distinct points drawn without
// replacement; an emptied cluster is reseeded at the point farthest from its
// own centroid; assignment ties go to the lower centroid index.
ClusterModel kmeans(std::span<const FeatureVector> points, int k, std::uint64_t seed,
                    int max_iter = 300);

// Ranks clusters by Euclidean distance of the centroid's (row, col) to the
// goal, ties by cluster index, and fills sorted_label/rank.
ClusterModel sort_clusters(ClusterModel model, Cell goal);

struct ClusterInputOptions {
  int k = 24;
  std::uint64_t seed = 0;
  int max_iter = 300;
  bool standardize = false;
};

// Sorted cluster label of each cell scaled to [0, 1] by (k - 1).
std::vector<double> scaled_labels(const ClusterModel& sorted);

std::vector<double> cluster_input_for(const Maze& maze, const TargetSolution& target,
                                      const ClusterInputOptions& options = {});

// Same pipeline over dynamic_features, used for clustering during epochs.
std::vector<double> dynamic_cluster_input_for(const Maze& maze, std::span<const double> cell_outputs,
                                              const ClusterInputOptions& options = {});

}  // namespace mazenet
