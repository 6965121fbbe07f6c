#include <algorithm>
#include <chrono>
#include <iomanip>
#include <limits>
#include <ostream>

#include "mazenet/error.hpp"
#include "mazenet/experiment.hpp"
#include "mazenet/rng.hpp"

namespace mazenet {

namespace {

// Keeps timed results observable.
volatile double bench_sink = 0.0;

template <typename F>
double median_ms(int reps, F&& f) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(reps));
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(times.begin(), times.end());
  const std::size_t mid = times.size() / 2;
  return times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd a(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

}  // namespace

Eigen::MatrixXd bench_covariance(int p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "bench-K"));
  const Eigen::MatrixXd a = uniform_matrix(p, p, rng);
  Eigen::MatrixXd K = a * a.transpose() / p;
  K.diagonal().array() += 1.0;
  return K;
}

Eigen::MatrixXd bench_jacobian(int m, int p, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "bench-C", static_cast<std::uint64_t>(m)));
  return uniform_matrix(m, p, rng) / std::sqrt(static_cast<double>(p));
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.p < 1 || config.reps < 1) throw ArgumentError("run_bench: p and reps must be positive");
  std::vector<BenchRow> rows;
  const Eigen::MatrixXd K = bench_covariance(config.p, config.seed);

  for (int m : config.gain_sizes) {
    if (m < 1) throw ArgumentError("run_bench: sizes must be positive");
    const Eigen::MatrixXd C = bench_jacobian(m, config.p, config.seed);
    double sink = 0.0;
    const double naive = median_ms(config.reps, [&] {
      sink += kalman_gain(K, C, 1.0, GainMode::NaiveInverse).G(0, 0);
    });
    const double solve = median_ms(config.reps, [&] {
      sink += kalman_gain(K, C, 1.0, GainMode::LinearSolve).G(0, 0);
    });
    const double ratio = solve > 0.0 ? naive / solve : 0.0;
    rows.push_back({BenchKernel::Gain, m, config.p, "naive_inverse", config.reps, naive, ratio});
    rows.push_back({BenchKernel::Gain, m, config.p, "linear_solve", config.reps, solve, ratio});
    bench_sink = sink;
  }

  for (int m : config.jacobian_sizes) {
    if (m < 1) throw ArgumentError("run_bench: sizes must be positive");
    Rng rng(derive_seed(config.seed, "bench-fd", static_cast<std::uint64_t>(m)));
    const Eigen::MatrixXd plus = uniform_matrix(config.p, m, rng);
    const Eigen::MatrixXd minus = uniform_matrix(config.p, m, rng);
    double sink = 0.0;
    const double growth = median_ms(config.reps, [&] {
      sink += assemble_jacobian(plus, minus, 1e-5, Assembly::RowGrowth)(0, 0);
    });
    const double prealloc = median_ms(config.reps, [&] {
      sink += assemble_jacobian(plus, minus, 1e-5, Assembly::Preallocated)(0, 0);
    });
    const double ratio = prealloc > 0.0 ? growth / prealloc : 0.0;
    rows.push_back({BenchKernel::JacobianAssembly, m, config.p, "row_growth", config.reps, growth, ratio});
    rows.push_back({BenchKernel::JacobianAssembly, m, config.p, "preallocated", config.reps, prealloc, ratio});
    bench_sink = sink;
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  const auto old = os.precision(6);
  os << "kernel,m,p,mode,reps,median_ms,speedup\n";
  for (const auto& r : rows)
    os << (r.kernel == BenchKernel::Gain ? "gain" : "jacobian_assembly") << ',' << r.m << ',' << r.p
       << ',' << r.mode << ',' << r.reps << ',' << r.median_ms << ',' << r.speedup << '\n';
  os.precision(old);
}

}  // namespace mazenet
