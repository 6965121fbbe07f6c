#include <cmath>
#include <sstream>

#include "mazenet/ekf.hpp"
#include "mazenet/error.hpp"

namespace mazenet {

namespace {

void check_condition(double rcond) {
  if (!(rcond * kMaxGammaCondition >= 1.0)) {
    std::ostringstream msg;
    msg << "kalman_gain: Gamma is numerically singular (condition estimate " << 1.0 / rcond
        << " > " << kMaxGammaCondition << "); increase the measurement noise R";
    throw NumericError(msg.str());
  }
}

}  // namespace

KalmanState KalmanState::init(const WeightSet& weights, double k0_scale, double r, double q) {
  if (!(k0_scale > 0.0)) throw ArgumentError("KalmanState: K0 scale must be positive");
  if (!(r > 0.0)) throw ArgumentError("KalmanState: R must be positive");
  if (!(q >= 0.0)) throw ArgumentError("KalmanState: Q must be non-negative");
  KalmanState s;
  const auto p = static_cast<Eigen::Index>(weights.size());
  s.w = Eigen::Map<const Eigen::VectorXd>(weights.flat().data(), p);
  s.K = Eigen::MatrixXd::Identity(p, p) * k0_scale;
  s.R = r;
  s.Q = q;
  return s;
}

WeightSet KalmanState::weights(const CsrnConfig& config) const {
  if (w.size() != config.weight_count())
    throw ArgumentError("KalmanState: weight vector does not match config");
  return {config.n_recurrent, config.input_width(), std::vector<double>(w.data(), w.data() + w.size())};
}

GainWorkspace kalman_gain(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C, double R,
                          GainMode mode) {
  if (K.rows() != K.cols() || C.cols() != K.rows())
    throw ArgumentError("kalman_gain: C is " + std::to_string(C.rows()) + "x" +
                        std::to_string(C.cols()) + " but K is " + std::to_string(K.rows()) + "x" +
                        std::to_string(K.cols()));
  if (!(R > 0.0)) throw ArgumentError("kalman_gain: R must be positive");

  GainWorkspace ws;
  ws.mode = mode;
  const Eigen::MatrixXd CK = C * K;  // (K C^T)^T for symmetric K
  ws.Gamma = CK * C.transpose();
  ws.Gamma = (0.5 * (ws.Gamma + ws.Gamma.transpose())).eval();
  ws.Gamma.diagonal().array() += R;

  if (mode == GainMode::NaiveInverse) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(ws.Gamma);
    ws.rcond = lu.rcond();
    check_condition(ws.rcond);
    const Eigen::MatrixXd inverse = lu.inverse();
    ws.G = CK.transpose() * inverse;
  } else {
    Eigen::LLT<Eigen::MatrixXd> llt(ws.Gamma);
    if (llt.info() != Eigen::Success)
      throw NumericError("kalman_gain: Gamma is not positive definite; increase the measurement noise R");
    ws.rcond = llt.rcond();
    check_condition(ws.rcond);
    ws.G = llt.solve(CK).transpose();
  }
  return ws;
}

KalmanState kalman_step(const KalmanState& state, const Eigen::MatrixXd& C,
                        const Eigen::VectorXd& alpha, GainMode mode) {
  return kalman_step(state, C, alpha, kalman_gain(state.K, C, state.R, mode));
}

KalmanState kalman_step(const KalmanState& state, const Eigen::MatrixXd& C,
                        const Eigen::VectorXd& alpha, const GainWorkspace& gain) {
  if (alpha.size() != C.rows())
    throw ArgumentError("kalman_step: innovation length does not match Jacobian rows");
  if (gain.G.rows() != state.w.size() || gain.G.cols() != C.rows())
    throw ArgumentError("kalman_step: gain shape does not match state and batch");

  KalmanState next;
  next.R = state.R;
  next.Q = state.Q;
  next.step_count = state.step_count + 1;
  next.w = state.w + gain.G * alpha;
  next.K = state.K - gain.G * (C * state.K);
  next.K = (0.5 * (next.K + next.K.transpose())).eval();
  if (state.Q > 0.0) next.K.diagonal().array() += state.Q;
  if (!next.w.allFinite() || !next.K.allFinite())
    throw NumericError("kalman_step: non-finite weights or covariance after update " +
                       std::to_string(next.step_count));
  return next;
}

GainComparison compare_gains(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ArgumentError("compare_gains: shape mismatch");
  GainComparison out;
  if (a.size() == 0) return out;
  const Eigen::MatrixXd diff = a - b;
  out.max_abs_diff = diff.cwiseAbs().maxCoeff();
  out.sse = diff.squaredNorm();
  const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  out.max_rel_diff = scale > 0.0 ? out.max_abs_diff / scale : 0.0;
  return out;
}

GainComparison gain_equivalence_check(const Eigen::MatrixXd& K, const Eigen::MatrixXd& C, double R) {
  const auto naive = kalman_gain(K, C, R, GainMode::NaiveInverse);
  const auto solved = kalman_gain(K, C, R, GainMode::LinearSolve);
  return compare_gains(naive.G, solved.G);
}

}  // namespace mazenet
