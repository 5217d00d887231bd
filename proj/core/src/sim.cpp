#include "funcctl/sim.hpp"

#include <cmath>

namespace funcctl::sim {

long SimConfig::steps() const {
  return static_cast<long>(std::ceil(t_final / dt - 1e-12));
}

void SimConfig::validate() const {
  if (!(dt > 0.0) || !(t_final > 0.0) || dt > t_final)
    throw std::invalid_argument("SimConfig: need 0 < dt <= t_final");
  if (steps() > max_steps) throw StepBudgetExceeded("SimConfig: step budget exceeded");
}

const Matrix& Trace::channel(const std::string& name) const {
  const auto it = channels.find(name);
  if (it == channels.end()) throw std::invalid_argument("Trace: no channel named " + name);
  return it->second;
}

Vector Trace::channel_norms(const std::string& name) const {
  const Matrix& ch = channel(name);
  Vector out(ch.rows());
  for (Index i = 0; i < ch.rows(); ++i) out(i) = ch.row(i).norm();
  return out;
}

namespace {

Trace integrate(const Matrix& Acl, const Vector& x0, const SimConfig& cfg) {
  cfg.validate();
  if (Acl.rows() != Acl.cols()) throw DimensionMismatch("simulate: system matrix must be square");
  if (x0.size() != Acl.rows())
    throw DimensionMismatch("simulate: initial state size does not match the system");
  if (!is_finite(Acl) || !is_finite(x0))
    throw std::invalid_argument("simulate: inputs must be finite");

  const long steps = cfg.steps();
  const double h = cfg.dt;
  Trace trace;
  trace.times.resize(steps + 1);
  trace.states.resize(steps + 1, x0.size());

  Vector x = x0;
  trace.times(0) = 0.0;
  trace.states.row(0) = x.transpose();
  Vector k1, k2, k3, k4;
  for (long k = 0; k < steps; ++k) {
    k1 = Acl * x;
    k2 = Acl * (x + (h / 2.0) * k1);
    k3 = Acl * (x + (h / 2.0) * k2);
    k4 = Acl * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    trace.times(k + 1) = static_cast<double>(k + 1) * h;
    trace.states.row(k + 1) = x.transpose();
  }
  return trace;
}

}  // namespace

Trace simulate_lti(const Matrix& Acl, const Vector& x0, const SimConfig& cfg) {
  return integrate(Acl, x0, cfg);
}

Trace simulate_observer_closed_loop(const synthesis::SystemTriple& sys,
                                    const synthesis::ControllerDesign& ctrl,
                                    const synthesis::ObserverDesign& obs, const Vector& x0,
                                    const Vector& w0, const SimConfig& cfg,
                                    const TolerancePolicy& tol) {
  const synthesis::SeparationClosedLoop loop = synthesis::assemble_separation(sys, ctrl, obs, tol);
  const Index n = sys.n();
  const Index q = obs.order_q;
  const Index q1 = ctrl.order();
  const Index r = q1 - ctrl.R1.rows();
  if (x0.size() != n) throw DimensionMismatch("simulate: x0 must have n entries");
  if (w0.size() != q) throw DimensionMismatch("simulate: w0 must have q entries");

  Vector state0(n + q);
  state0 << x0, w0;
  Trace trace = integrate(loop.A_full, state0, cfg);

  // Channel maps acting on the stacked state (x, w).
  Matrix P = Matrix::Zero(q1, q);
  P.leftCols(q1) = Matrix::Identity(q1, q1);
  const Matrix Z_eff = ctrl.Z * P;

  Matrix z_map(r, n + q);
  z_map << ctrl.Fbar.topRows(r), Matrix::Zero(r, q);
  Matrix estimate_map(q, n + q);  // w + E C x
  estimate_map << obs.E * sys.C, Matrix::Identity(q, q);
  Matrix err_map(q, n + q);  // Fbar x - (w + E C x)
  err_map << obs.Fbar - obs.E * sys.C, -Matrix::Identity(q, q);
  const Matrix u_map = -Z_eff * estimate_map;

  trace.channels["z"] = trace.states * z_map.transpose();
  trace.channels["zhat"] = (trace.states * estimate_map.transpose()).leftCols(r);
  trace.channels["err"] = trace.states * err_map.transpose();
  trace.channels["u"] = trace.states * u_map.transpose();
  return trace;
}

double decay_rate(const Trace& trace, const std::string& channel, double t_begin, double t_end) {
  if (!(t_begin < t_end)) throw std::invalid_argument("decay_rate: empty window");
  const Matrix& ch = trace.channel(channel);
  double sum_t = 0.0, sum_y = 0.0, sum_tt = 0.0, sum_ty = 0.0;
  long count = 0;
  for (Index i = 0; i < trace.samples(); ++i) {
    const double t = trace.times(i);
    if (t < t_begin - 1e-12 || t > t_end + 1e-12) continue;
    const double norm = ch.row(i).norm();
    if (norm < 1e-14)
      throw SignalUnderflow("decay_rate: channel norm below 1e-14 inside the window");
    const double y = std::log(norm);
    sum_t += t;
    sum_y += y;
    sum_tt += t * t;
    sum_ty += t * y;
    ++count;
  }
  if (count < 2) throw std::invalid_argument("decay_rate: window contains fewer than two samples");
  const double denom = count * sum_tt - sum_t * sum_t;
  if (denom == 0.0) throw std::invalid_argument("decay_rate: degenerate window");
  return (count * sum_ty - sum_t * sum_y) / denom;
}

}  // namespace funcctl::sim
