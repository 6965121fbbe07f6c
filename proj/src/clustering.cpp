#include "mazenet/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mazenet/error.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

namespace {

double goal_distance_sq(Cell c, Cell goal) {
  const double dr = c.row - goal.row;
  const double dc = c.col - goal.col;
  return dr * dr + dc * dc;
}

ClusterModel label_pipeline(std::vector<FeatureVector> features, Cell goal,
                            const ClusterInputOptions& options) {
  // Sorting uses the unscaled (row, col) of each centroid.
  std::vector<FeatureVector> raw;
  if (options.standardize) {
    raw = features;
    standardize(features);
  }
  ClusterModel model = kmeans(features, options.k, options.seed, options.max_iter);
  if (options.standardize) {
    for (int j = 0; j < model.k; ++j) {
      FeatureVector mean{};
      int members = 0;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (model.assignment[i] != j) continue;
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += raw[i][d];
        ++members;
      }
      if (members > 0)
        for (auto& v : mean) v /= members;
      model.centroids[static_cast<std::size_t>(j)] = mean;
    }
  }
  return sort_clusters(std::move(model), goal);
}

}  // namespace

std::vector<FeatureVector> static_features(const Maze& maze, const TargetSolution& target) {
  if (target.size() != maze.size())
    throw ArgumentError("static_features: target does not match maze size");
  const int n = maze.size();
  const Cell goal = maze.goal();
  std::vector<FeatureVector> out(maze.cell_count());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell here{r, c};
      const double d_here = goal_distance_sq(here, goal);
      FeatureVector& f = out[maze.index(here)];
      f[0] = r;
      f[1] = c;
      for (Direction d : kDirections) {
        const Cell nb = step(here, d);
        const bool closer = maze.in_bounds(nb) && goal_distance_sq(nb, goal) < d_here;
        f[2 + static_cast<std::size_t>(d)] = closer ? 1.0 : -1.0;
      }
      switch (maze.at(here)) {
        case CellKind::Path:
          f[6] = 0.0;
          break;
        case CellKind::Obstacle:
          f[6] = 1.0;
          break;
        case CellKind::Goal:
          f[6] = -1.0;
          break;
      }
    }
  }
  return out;
}

std::vector<FeatureVector> dynamic_features(const Maze& maze, std::span<const double> cell_outputs) {
  if (cell_outputs.size() != maze.cell_count())
    throw ArgumentError("dynamic_features: outputs have " + std::to_string(cell_outputs.size()) +
                        " entries, maze has " + std::to_string(maze.cell_count()) + " cells");
  const int n = maze.size();
  std::vector<FeatureVector> out(maze.cell_count());
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Cell here{r, c};
      FeatureVector& f = out[maze.index(here)];
      f[0] = r;
      f[1] = c;
      for (Direction d : kDirections) {
        const Cell nb = step(here, d);
        f[2 + static_cast<std::size_t>(d)] = maze.in_bounds(nb) ? cell_outputs[maze.index(nb)] : 0.0;
      }
      f[6] = cell_outputs[maze.index(here)];
    }
  }
  return out;
}

void standardize(std::vector<FeatureVector>& points) {
  if (points.empty()) return;
  const double count = static_cast<double>(points.size());
  for (std::size_t d = 0; d < 7; ++d) {
    double mean = 0.0;
    for (const auto& p : points) mean += p[d];
    mean /= count;
    double var = 0.0;
    for (const auto& p : points) var += (p[d] - mean) * (p[d] - mean);
    const double sd = std::sqrt(var / count);
    for (auto& p : points) p[d] = sd > 0.0 ? (p[d] - mean) / sd : p[d] - mean;
  }
}

double squared_distance(const FeatureVector& a, const FeatureVector& b) noexcept {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

ClusterModel kmeans(std::span<const FeatureVector> points, int k, std::uint64_t seed, int max_iter) {
  if (points.empty()) throw ArgumentError("kmeans: no points");
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1");
  if (max_iter < 1) throw ArgumentError("kmeans: max_iter must be >= 1");

  // First occurrence of every distinct point, in input order.
  std::vector<std::size_t> distinct;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&](std::size_t j) { return points[j] == points[i]; });
    if (!seen) distinct.push_back(i);
  }
  if (static_cast<std::size_t>(k) > distinct.size())
    throw ArgumentError("kmeans: k=" + std::to_string(k) + " exceeds the " +
                        std::to_string(distinct.size()) + " distinct points");

  // Partial Fisher-Yates over the distinct indices.
  Rng rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(distinct.size() - i));
    std::swap(distinct[i], distinct[j]);
  }

  ClusterModel model;
  model.k = k;
  model.centroids.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) model.centroids.push_back(points[distinct[static_cast<std::size_t>(j)]]);
  model.assignment.assign(points.size(), -1);

  const auto kk = static_cast<std::size_t>(k);
  std::vector<double> own_distance(points.size());
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      int best = 0;
      double best_d = squared_distance(points[i], model.centroids[0]);
      for (std::size_t j = 1; j < kk; ++j) {
        const double d = squared_distance(points[i], model.centroids[j]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(j);
        }
      }
      if (model.assignment[i] != best) changed = true;
      model.assignment[i] = best;
      own_distance[i] = best_d;
      objective += best_d;
    }
    model.iterations_run = iter + 1;
    model.objective.push_back(objective);
    if (!changed) break;

    std::vector<FeatureVector> sums(kk, FeatureVector{});
    std::vector<std::size_t> counts(kk, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto j = static_cast<std::size_t>(model.assignment[i]);
      for (std::size_t d = 0; d < 7; ++d) sums[j][d] += points[i][d];
      ++counts[j];
    }
    std::vector<bool> taken(points.size(), false);
    for (std::size_t j = 0; j < kk; ++j) {
      if (counts[j] > 0) {
        for (std::size_t d = 0; d < 7; ++d)
          model.centroids[j][d] = sums[j][d] / static_cast<double>(counts[j]);
        continue;
      }
      // Empty cluster: move it onto the worst-served point not already used
      // for another repair in this pass.
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (!taken[i] && own_distance[i] > far_d) {
          far_d = own_distance[i];
          far = i;
        }
      }
      taken[far] = true;
      model.centroids[j] = points[far];
    }
  }
  return model;
}

ClusterModel sort_clusters(ClusterModel model, Cell goal) {
  const auto kk = static_cast<std::size_t>(model.k);
  std::vector<double> dist(kk);
  for (std::size_t j = 0; j < kk; ++j) {
    const double dr = model.centroids[j][0] - goal.row;
    const double dc = model.centroids[j][1] - goal.col;
    dist[j] = std::sqrt(dr * dr + dc * dc);
  }
  std::vector<int> order(kk);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)];
  });
  model.rank.assign(kk, 0);
  for (std::size_t r = 0; r < kk; ++r) model.rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  model.sorted_label.resize(model.assignment.size());
  for (std::size_t i = 0; i < model.assignment.size(); ++i)
    model.sorted_label[i] = model.rank[static_cast<std::size_t>(model.assignment[i])];
  return model;
}

std::vector<double> scaled_labels(const ClusterModel& sorted) {
  const double denom = static_cast<double>(std::max(sorted.k - 1, 1));
  std::vector<double> out(sorted.sorted_label.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sorted.sorted_label[i] / denom;
  return out;
}

std::vector<double> cluster_input_for(const Maze& maze, const TargetSolution& target,
                                      const ClusterInputOptions& options) {
  return scaled_labels(label_pipeline(static_features(maze, target), maze.goal(), options));
}

std::vector<double> dynamic_cluster_input_for(const Maze& maze, std::span<const double> cell_outputs,
                                              const ClusterInputOptions& options) {
  return scaled_labels(label_pipeline(dynamic_features(maze, cell_outputs), maze.goal(), options));
}

}  // namespace mazenet
