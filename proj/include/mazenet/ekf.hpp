#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mazenet/csrn.hpp"

namespace mazenet {

// One maze's contribution to a measurement batch: its network inputs, the
// cells that are measured, and their normalized targets.
struct MeasurementSet {
  InputGrid inputs;
  std::vector<std::size_t> cells;  // row-major cell indices
  std::vector<double> targets;     // same length as cells
};

// Rows of C and entries of alpha correspond one to one; rows are ordered by
// maze, then by the maze's cell list.
struct JacobianBatch {
  Eigen::MatrixXd C;                              // m x p
  Eigen::VectorXd alpha;                          // target - output
  std::vector<std::vector<double>> base_outputs;  // unperturbed outputs per maze
};

// Preallocated writes straight into an m x p matrix. RowGrowth appends one
// row at a time, reallocating and copying the matrix for every row.
enum class Assembly { Preallocated, RowGrowth };

struct JacobianOptions {
  double step = 1e-5;  // central-difference step on each flattened weight
  Assembly assembly = Assembly::Preallocated;
  bool parallel = true;
};

// Central finite differences: 2p perturbed forward passes, each shared by
// every measured cell of every maze.
JacobianBatch compute_jacobian(const WeightSet& weights, std::span<const MeasurementSet> sets,
                               const CsrnConfig& config, const JacobianOptions& options = {});

// plus/minus hold perturbed outputs as p x m (weight-major).
Eigen::MatrixXd assemble_jacobian(const Eigen::MatrixXd& plus, const Eigen::MatrixXd& minus,
                                  double step, Assembly assembly);

enum class GainMode { NaiveInverse, LinearSolve };

struct KalmanState {
  Eigen::VectorXd w;  // flattened weights
  Eigen::MatrixXd K;  // error covariance
  double R = 1.0;     // measurement noise, R(n) = R * I
  double Q = 0.0;     // process noise added to the covariance diagonal after each update
  std::size_t step_count = 0;

  // w from `weights`, K = k0_scale * I.
  static KalmanState init(const WeightSet& weights, double k0_scale, double r, double q = 0.0);
  WeightSet weights(const CsrnConfig& config) const;
};

struct GainWorkspace {
  Eigen::MatrixXd Gamma;  // m x m
  Eigen::MatrixXd G;      // p x m
  GainMode mode = GainMode::LinearSolve;
  double rcond = 0.0;     // reciprocal condition estimate of Gamma
};

// Largest accepted condition estimate of Gamma.
inline constexpr double kMaxGammaCondition = 1e12;

// Gamma = C K C^T + R I. NaiveInverse forms Gamma^{-1} explicitly and
// multiplies; LinearSolve factors Gamma and solves Gamma X = C K for X = G^T.
GainWorkspace kalman_gain(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C, double R,
                          GainMode mode);

// w += G alpha; K -= G C K, then K is re-symmetrized (and Q added).
KalmanState kalman_step(const KalmanState& state, const Eigen::MatrixXd& C,
                        const Eigen::VectorXd& alpha, GainMode mode);
// Same update with a gain already computed for (state.K, C).
KalmanState kalman_step(const KalmanState& state, const Eigen::MatrixXd& C,
                        const Eigen::VectorXd& alpha, const GainWorkspace& gain);

struct GainComparison {
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;  // max |diff| / max |G|
  double sse = 0.0;
};

GainComparison compare_gains(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Gain under both modes and their element-wise discrepancy.
GainComparison gain_equivalence_check(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C, double R);

}  // namespace mazenet
