#pragma once

#include "funcctl/synthesis.hpp"
#include "funcctl/types.hpp"

#include <map>
#include <string>

namespace funcctl::sim {

/// Fixed-step configuration. The integrator is classical fourth-order
/// Runge-Kutta; there is no adaptive stepping.
struct SimConfig {
  double dt = 1e-3;
  double t_final = 10.0;

  static constexpr long max_steps = 10'000'000;

  long steps() const;
  void validate() const;
};

/// Uniformly sampled trajectory. states has one row per sample; named
/// channels are derived signals with the same number of rows.
struct Trace {
  Vector times;
  Matrix states;
  std::map<std::string, Matrix> channels;

  Index samples() const { return times.size(); }
  const Matrix& channel(const std::string& name) const;

  /// Euclidean norm of one channel at every sample.
  Vector channel_norms(const std::string& name) const;
};

/// Integrate x' = Acl x from x0.
Trace simulate_lti(const Matrix& Acl, const Vector& x0, const SimConfig& cfg = {});

/// Integrate the coupled plant + observer loop under u = -Z zhat_aug and
/// record channels z, zhat, err, u.
Trace simulate_observer_closed_loop(const synthesis::SystemTriple& sys,
                                    const synthesis::ControllerDesign& ctrl,
                                    const synthesis::ObserverDesign& obs, const Vector& x0,
                                    const Vector& w0, const SimConfig& cfg = {},
                                    const TolerancePolicy& tol = {});

/// Least-squares slope of log |channel(t)| over t in [t_begin, t_end].
/// Throws SignalUnderflow when the channel norm drops below 1e-14 inside the
/// window.
double decay_rate(const Trace& trace, const std::string& channel, double t_begin, double t_end);

}  // namespace funcctl::sim
