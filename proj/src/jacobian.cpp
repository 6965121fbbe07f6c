#include <atomic>
#include <cmath>
#include <string>

#include "mazenet/ekf.hpp"
#include "mazenet/error.hpp"

namespace mazenet {

Eigen::MatrixXd assemble_jacobian(const Eigen::MatrixXd& plus, const Eigen::MatrixXd& minus,
                                  double step, Assembly assembly) {
  if (plus.rows() != minus.rows() || plus.cols() != minus.cols())
    throw ArgumentError("assemble_jacobian: perturbation buffers differ in shape");
  const Eigen::Index p = plus.rows();
  const Eigen::Index m = plus.cols();
  const double two_h = 2.0 * step;

  if (assembly == Assembly::Preallocated) {
    Eigen::MatrixXd C(m, p);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < p; ++j) C(i, j) = (plus(j, i) - minus(j, i)) / two_h;
    return C;
  }

  Eigen::MatrixXd C(0, p);
  Eigen::RowVectorXd row(p);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) row(j) = (plus(j, i) - minus(j, i)) / two_h;
    Eigen::MatrixXd grown(C.rows() + 1, p);
    grown.topRows(C.rows()) = C;
    grown.row(C.rows()) = row;
    C = std::move(grown);
  }
  return C;
}

JacobianBatch compute_jacobian(const WeightSet& weights, std::span<const MeasurementSet> sets,
                               const CsrnConfig& config, const JacobianOptions& options) {
  config.validate();
  if (!weights.matches(config)) throw ArgumentError("compute_jacobian: weights do not match config");
  if (!(options.step > 0.0)) throw ArgumentError("compute_jacobian: step must be positive");

  Eigen::Index m = 0;
  for (const auto& s : sets) {
    if (s.cells.size() != s.targets.size())
      throw ArgumentError("compute_jacobian: cells and targets differ in length");
    for (std::size_t c : s.cells)
      if (c >= s.inputs.cell_count()) throw ArgumentError("compute_jacobian: cell index out of range");
    m += static_cast<Eigen::Index>(s.cells.size());
  }
  const int p = config.weight_count();

  JacobianBatch batch;
  batch.alpha.resize(m);
  batch.base_outputs.reserve(sets.size());
  {
    Eigen::Index row = 0;
    for (const auto& s : sets) {
      auto state = options.parallel ? forward(s.inputs, weights, config)
                                    : forward_serial(s.inputs, weights, config);
      for (std::size_t k = 0; k < s.cells.size(); ++k)
        batch.alpha(row++) = s.targets[k] - state.outputs[s.cells[k]];
      batch.base_outputs.push_back(std::move(state.outputs));
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    if (!std::isfinite(batch.alpha(i)))
      throw NumericError("compute_jacobian: non-finite network output at the current weights");

  Eigen::MatrixXd plus(p, m);
  Eigen::MatrixXd minus(p, m);
  std::atomic<int> bad_weight{-1};

  // Each perturbed weight is an independent set of serial forward passes.
#pragma omp parallel for schedule(dynamic) if (options.parallel)
  for (int j = 0; j < p; ++j) {
    WeightSet shifted = weights;
    const double original = weights.flat()[static_cast<std::size_t>(j)];
    for (int sign = 0; sign < 2; ++sign) {
      shifted.flat()[static_cast<std::size_t>(j)] = sign == 0 ? original + options.step
                                                              : original - options.step;
      Eigen::MatrixXd& out = sign == 0 ? plus : minus;
      Eigen::Index row = 0;
      for (const auto& s : sets) {
        const auto state = forward_serial(s.inputs, shifted, config);
        for (std::size_t c : s.cells) {
          const double v = state.outputs[c];
          if (!std::isfinite(v)) {
            int expected = -1;
            bad_weight.compare_exchange_strong(expected, j);
          }
          out(j, row++) = v;
        }
      }
    }
  }
  if (bad_weight.load() >= 0)
    throw NumericError("compute_jacobian: non-finite output while perturbing weight " +
                       std::to_string(bad_weight.load()));

  batch.C = assemble_jacobian(plus, minus, options.step, options.assembly);
  return batch;
}

}  // namespace mazenet
