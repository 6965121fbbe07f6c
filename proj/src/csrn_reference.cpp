#include <cmath>

#include "mazenet/csrn.hpp"
#include "mazenet/error.hpp"

namespace mazenet::reference {

NetworkState forward(const InputGrid& inputs, const WeightSet& weights, const CsrnConfig& config) {
  config.validate();
  if (!weights.matches(config) || inputs.width != config.n_external || inputs.n < 1)
    throw ArgumentError("reference::forward: shape mismatch");

  const int n = inputs.n;
  const int n_rec = config.n_recurrent;
  const double edge = config.off_grid == OffGrid::Wall ? 1.0 : 0.0;
  auto activate = [&](double a) {
    return config.activation == Activation::Tanh ? std::tanh(a) : 1.0 / (1.0 + std::exp(-a));
  };

  // z[r][c][k]
  using Grid = std::vector<std::vector<std::vector<double>>>;
  Grid z(n, std::vector<std::vector<double>>(n, std::vector<double>(n_rec, 0.0)));
  auto y_of = [&](const Grid& g, int r, int c) {
    if (r < 0 || c < 0 || r >= n || c >= n) return edge;
    return g[r][c][config.output_node];
  };

  NetworkState state;
  state.n = n;
  state.n_recurrent = n_rec;
  for (int t = 0; t < config.iterations_for(n); ++t) {
    Grid next = z;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        std::vector<double> x;
        for (double v : inputs.cell(static_cast<std::size_t>(r * n + c))) x.push_back(v);
        x.push_back(y_of(z, r - 1, c));
        x.push_back(y_of(z, r + 1, c));
        x.push_back(y_of(z, r, c - 1));
        x.push_back(y_of(z, r, c + 1));
        for (double v : z[r][c]) x.push_back(v);
        x.push_back(1.0);
        for (int k = 0; k < n_rec; ++k) {
          double acc = 0.0;
          for (int col = 0; col < weights.cols(); ++col) acc += weights(k, col) * x[col];
          next[r][c][k] = activate(acc);
        }
      }
    }
    if (t > 0) {
      double delta = 0.0;
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
          delta = std::max(delta, std::abs(y_of(next, r, c) - y_of(z, r, c)));
      state.iteration_deltas.push_back(delta);
    }
    z = std::move(next);
  }

  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      for (double v : z[r][c]) state.z.push_back(v);
      state.outputs.push_back(z[r][c][config.output_node]);
    }
  }
  return state;
}

}  // namespace mazenet::reference
