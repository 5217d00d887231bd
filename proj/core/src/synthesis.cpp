#include "funcctl/synthesis.hpp"

#include <algorithm>
#include <cmath>

namespace funcctl::synthesis {

namespace {

using linalg::controllability_subspace;
using linalg::eigenvalues;
using linalg::numerical_rank;
using linalg::observability_subspace;
using linalg::place_poles;
using linalg::pseudoinverse;
using linalg::right_pseudoinverse;

Matrix stack_functional(const FunctionalTarget& f, const Matrix& R, Index n, const char* what) {
  if (R.rows() > 0 && R.cols() != n)
    throw DimensionMismatch(std::string(what) + ": augmentation rows must have n columns");
  return vstack(f.F, R);
}

void require_full_row_rank(const Matrix& Fbar, const TolerancePolicy& tol, const char* what) {
  if (numerical_rank(Fbar, tol) < Fbar.rows())
    throw RankDeficient(std::string(what) + ": stacked functional matrix is not full row rank");
}

void check_poles(const ComplexSpectrum& poles, Index expected, const TolerancePolicy& tol,
                 const DesignOptions& options, const char* what) {
  if (static_cast<Index>(poles.size()) != expected)
    throw std::invalid_argument(std::string(what) + ": need exactly " + std::to_string(expected) +
                                " poles");
  if (!poles.closed_under_conjugation(tol.eigen_match_tol))
    throw UnpairedComplexPole(std::string(what) + ": pole set not closed under conjugation");
  if (!options.allow_unstable_poles && poles.max_real() >= 0.0)
    throw std::invalid_argument(std::string(what) +
                                ": requested poles must have negative real parts");
}

// Real block-diagonal matrix with the requested spectrum: 1x1 blocks for real
// poles, [[a, b], [-b, a]] for conjugate pairs. Order: descending real part.
Matrix canonical_pole_matrix(const ComplexSpectrum& poles, double pair_tol) {
  std::vector<Complex> vals = poles.values;
  std::sort(vals.begin(), vals.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return std::abs(a.imag()) < std::abs(b.imag());
  });
  const Index q = static_cast<Index>(vals.size());
  Matrix N = Matrix::Zero(q, q);
  std::vector<bool> used(vals.size(), false);
  Index at = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (std::abs(vals[i].imag()) <= pair_tol) {
      N(at, at) = vals[i].real();
      ++at;
      continue;
    }
    bool paired = false;
    for (std::size_t j = i + 1; j < vals.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(vals[j] - std::conj(vals[i])) <= pair_tol) {
        used[j] = true;
        paired = true;
        break;
      }
    }
    if (!paired) throw UnpairedComplexPole("pole set not closed under conjugation");
    const double a = vals[i].real();
    const double b = std::abs(vals[i].imag());
    N(at, at) = a;
    N(at, at + 1) = b;
    N(at + 1, at) = -b;
    N(at + 1, at + 1) = a;
    at += 2;
  }
  return N;
}

double relative_norm(const Matrix& M, const Matrix& reference) {
  return M.norm() / std::max(1.0, reference.norm());
}

// Reduced pairs and solution-space projectors come out of pseudoinverses;
// their rank decisions need the floored policy.
TolerancePolicy derived_policy(const TolerancePolicy& tol) { return tol.floored(); }

}  // namespace

const char* to_string(AugmentationStrategy s) {
  switch (s) {
    case AugmentationStrategy::empty: return "empty";
    case AugmentationStrategy::index_rows: return "index_rows";
    case AugmentationStrategy::kalman_complement: return "kalman_complement";
    case AugmentationStrategy::full_complement: return "full_complement";
  }
  return "unknown";
}

std::pair<bool, bool> controller_conditions(const SystemTriple& sys, const FunctionalTarget& f,
                                            const Matrix& R1, const TolerancePolicy& tol) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const Matrix Fbar = stack_functional(f, R1, sys.n(), "controller_conditions");
  require_full_row_rank(Fbar, tol, "controller_conditions");

  const Matrix Fplus = right_pseudoinverse(Fbar, tol);
  const Matrix FbarA = Fbar * sys.A;
  const Matrix residual = FbarA * (Matrix::Identity(sys.n(), sys.n()) - Fplus * Fbar);
  const bool cond_a = relative_norm(residual, FbarA) <= tol.absolute_zero_tol;

  const Matrix reduced_A = FbarA * Fplus;
  const Matrix reduced_B = Fbar * sys.B;
  const bool cond_b =
      controllability_subspace(reduced_A, reduced_B, derived_policy(tol)).dimension == Fbar.rows();
  return {cond_a, cond_b};
}

ControllerDesign design_functional_controller(const SystemTriple& sys, const FunctionalTarget& f,
                                              const Matrix& R1, const ComplexSpectrum& poles,
                                              const TolerancePolicy& tol,
                                              const DesignOptions& options) {
  const auto [cond_a, cond_b] = controller_conditions(sys, f, R1, tol);
  if (!cond_a || !cond_b)
    throw ConditionsViolated(std::string("design_functional_controller: ") +
                             (!cond_a ? "the functional dynamics do not close on Fbar"
                                      : "the reduced pair is not controllable"));

  ControllerDesign d;
  d.R1 = R1.rows() > 0 ? R1 : Matrix(0, sys.n());
  d.Fbar = stack_functional(f, R1, sys.n(), "design_functional_controller");
  check_poles(poles, d.Fbar.rows(), tol, options, "design_functional_controller");

  const Matrix Fplus = right_pseudoinverse(d.Fbar, tol);
  d.reduced_A = d.Fbar * sys.A * Fplus;
  d.reduced_B = d.Fbar * sys.B;
  d.Z = place_poles(d.reduced_A, d.reduced_B, poles, derived_policy(tol));
  d.assigned_poles = poles.sorted();

  // Assigned poles must reappear in the physical closed loop.
  const ComplexSpectrum closed = eigenvalues(sys.A - sys.B * d.Z * d.Fbar);
  const ComplexSpectrum reduced = eigenvalues(d.reduced_A - d.reduced_B * d.Z);
  if (!spectrum_contains(closed, reduced, tol.eigen_match_tol))
    throw ConvergenceFailure(
        "design_functional_controller: reduced spectrum not contained in the closed loop");
  return d;
}

SynthesisWorkspace make_workspace(const SystemTriple& sys, const Matrix& Fbar,
                                  const TolerancePolicy& tol) {
  SynthesisWorkspace w;
  const Index q = Fbar.rows();
  w.Sigma = vstack({Fbar, sys.C * sys.A, sys.C});
  const Matrix Sigma_plus = pseudoinverse(w.Sigma, derived_policy(tol));
  w.Theta_particular = Fbar * sys.A * Sigma_plus;
  w.N1 = w.Theta_particular.leftCols(q);
  const Matrix projector =
      Matrix::Identity(w.Sigma.rows(), w.Sigma.rows()) - w.Sigma * Sigma_plus;
  w.Mfree = projector.leftCols(q);
  return w;
}

std::pair<bool, bool> observer_conditions(const SystemTriple& sys, const FunctionalTarget& f,
                                          const Matrix& R, const TolerancePolicy& tol) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const Matrix Fbar = stack_functional(f, R, sys.n(), "observer_conditions");
  require_full_row_rank(Fbar, tol, "observer_conditions");

  // Solvability of Theta [Fbar; CA; C] = Fbar A: row space membership.
  const Matrix base = vstack({sys.C * sys.A, sys.C, Fbar});
  const SubspaceBasis row_space =
      linalg::orthonormal_columns(base.transpose(), derived_policy(tol));
  const Matrix FbarA = Fbar * sys.A;
  bool cond_a = true;
  const double threshold = std::max(tol.absolute_zero_tol, row_space.tol_used);
  for (Index i = 0; i < FbarA.rows(); ++i)
    if (row_space.relative_residual(FbarA.row(i).transpose()) > threshold) cond_a = false;

  const SynthesisWorkspace w = make_workspace(sys, Fbar, tol);
  const bool cond_b =
      controllability_subspace(w.N1.transpose(), w.Mfree.transpose(), derived_policy(tol))
          .dimension == Fbar.rows();
  return {cond_a, cond_b};
}

ObserverDesign design_functional_observer(const SystemTriple& sys, const FunctionalTarget& f,
                                          const Matrix& R, const ComplexSpectrum& poles,
                                          const TolerancePolicy& tol,
                                          const DesignOptions& options) {
  const auto [cond_a, cond_b] = observer_conditions(sys, f, R, tol);
  if (!cond_a || !cond_b)
    throw ConditionsViolated(std::string("design_functional_observer: ") +
                             (!cond_a ? "the parameter equation has no solution"
                                      : "observer poles cannot be assigned freely"));

  ObserverDesign d;
  d.R = R.rows() > 0 ? R : Matrix(0, sys.n());
  d.Fbar = stack_functional(f, R, sys.n(), "design_functional_observer");
  d.order_q = d.Fbar.rows();
  check_poles(poles, d.order_q, tol, options, "design_functional_observer");

  const Index q = d.order_q;
  const Index p = sys.p();
  const SynthesisWorkspace w = make_workspace(sys, d.Fbar, tol);
  const Matrix projector = Matrix::Identity(w.Sigma.rows(), w.Sigma.rows()) -
                           w.Sigma * pseudoinverse(w.Sigma, derived_policy(tol));

  // Prefer the real canonical form of the requested poles; it is reachable
  // whenever Mfree has full column rank and keeps printed designs tidy.
  Matrix Zfree;
  const Matrix N_target = canonical_pole_matrix(poles, tol.eigen_match_tol);
  Matrix candidate = (N_target - w.N1) * pseudoinverse(w.Mfree, derived_policy(tol));
  if ((w.N1 + candidate * w.Mfree - N_target).norm() <=
      tol.absolute_zero_tol * std::max(1.0, N_target.norm())) {
    Zfree = candidate;
  } else {
    const Matrix gain =
        place_poles(w.N1.transpose(), w.Mfree.transpose(), poles, derived_policy(tol));
    Zfree = -gain.transpose();
  }

  const Matrix Theta = w.Theta_particular + Zfree * projector;
  d.N = Theta.leftCols(q);
  d.E = Theta.middleCols(q, p);
  d.K = Theta.rightCols(p);
  d.J = d.K + d.N * d.E;
  d.H = (d.Fbar - d.E * sys.C) * sys.B;
  d.assigned_poles = poles.sorted();

  const ObserverResidualReport report = verify_observer(sys, f, d.R, d, tol);
  if (!report.pass || !spectra_match(report.n_spectrum, poles, tol.eigen_match_tol))
    throw ConvergenceFailure("design_functional_observer: defining equations not satisfied");
  return d;
}

ObserverResidualReport verify_observer(const SystemTriple& sys, const FunctionalTarget& f,
                                       const Matrix& R, const ObserverDesign& design,
                                       const TolerancePolicy& tol) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const Matrix Fbar = stack_functional(f, R, sys.n(), "verify_observer");
  ObserverResidualReport out;
  const Matrix constraint =
      Fbar * sys.A - design.N * Fbar - design.E * sys.C * sys.A - design.K * sys.C;
  out.constraint_residual = constraint.norm();
  out.input_map_residual = (design.H - (Fbar - design.E * sys.C) * sys.B).norm();
  out.n_spectrum = eigenvalues(design.N);
  out.pass = out.constraint_residual <= tol.absolute_zero_tol &&
             out.input_map_residual <= tol.absolute_zero_tol;
  return out;
}

Matrix build_index_augmentation(const Matrix& A, const FunctionalTarget& f,
                                const TolerancePolicy& tol) {
  const std::vector<int> nu = linalg::observability_indices(A, f.F, tol);
  std::vector<Matrix> rows;
  for (Index i = 0; i < f.F.rows(); ++i) {
    Matrix power = f.F.row(i);
    for (int k = 1; k < nu[static_cast<std::size_t>(i)]; ++k) {
      power = power * A;
      rows.push_back(power);
    }
  }
  if (rows.empty()) return Matrix(0, A.cols());
  return vstack(rows);
}

AugmentationResult find_controller_augmentation(const SystemTriple& sys,
                                                const FunctionalTarget& f,
                                                const TolerancePolicy& tol) {
  sys.validate(tol);
  f.validate(sys.n(), tol);

  AugmentationResult result;
  auto consider = [&](AugmentationStrategy strategy, const Matrix& R1) {
    if (result.found) return;
    AugmentationAttempt attempt{strategy, R1.rows(), false, false, ""};
    try {
      const auto [a, b] = controller_conditions(sys, f, R1, tol);
      attempt.cond_a = a;
      attempt.cond_b = b;
      if (a && b) {
        result.found = true;
        result.R = R1;
        result.strategy = strategy;
        result.cond_a = a;
        result.cond_b = b;
      } else {
        attempt.note = !a ? "condition (a) failed" : "condition (b) failed";
      }
    } catch (const Error& e) {
      attempt.note = e.what();
    }
    result.attempts.push_back(attempt);
  };

  consider(AugmentationStrategy::empty, Matrix(0, sys.n()));
  const Matrix index_rows = build_index_augmentation(sys.A, f, tol);
  if (index_rows.rows() > 0) consider(AugmentationStrategy::index_rows, index_rows);
  const Matrix complement = linalg::row_space_complement(f.F, tol);
  if (complement.rows() > 0) consider(AugmentationStrategy::full_complement, complement);
  return result;
}

AugmentationResult find_observer_augmentation(const SystemTriple& sys, const FunctionalTarget& f,
                                              const TolerancePolicy& tol) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  if (!criteria::is_functional_observable(sys, f, tol))
    throw NotFunctionalObservable(
        "find_observer_augmentation: the functional is not observable from y");

  AugmentationResult result;
  auto consider = [&](AugmentationStrategy strategy, const Matrix& R) {
    if (result.found) return;
    AugmentationAttempt attempt{strategy, R.rows(), false, false, ""};
    try {
      const auto [a, b] = observer_conditions(sys, f, R, tol);
      attempt.cond_a = a;
      attempt.cond_b = b;
      if (a && b) {
        result.found = true;
        result.R = R;
        result.strategy = strategy;
        result.cond_a = a;
        result.cond_b = b;
      } else {
        attempt.note = !a ? "condition (a) failed" : "condition (b) failed";
      }
    } catch (const Error& e) {
      attempt.note = e.what();
    }
    result.attempts.push_back(attempt);
  };

  consider(AugmentationStrategy::empty, Matrix(0, sys.n()));
  const Matrix index_rows = build_index_augmentation(sys.A, f, tol);
  if (index_rows.rows() > 0) consider(AugmentationStrategy::index_rows, index_rows);

  // Kalman complement: complete F inside the observable subspace.
  const SubspaceBasis obs = observability_subspace(sys.A, sys.C, tol);
  const Matrix F_obs = f.F * obs.basis;  // r x k coordinates in the observable subspace
  const Matrix F_obs_perp = linalg::row_space_complement(F_obs, tol);
  if (F_obs_perp.rows() > 0)
    consider(AugmentationStrategy::kalman_complement, F_obs_perp * obs.basis.transpose());
  return result;
}

SeparationClosedLoop assemble_separation(const SystemTriple& sys, const ControllerDesign& ctrl,
                                         const ObserverDesign& obs, const TolerancePolicy& tol) {
  sys.validate(tol);
  const Index q1 = ctrl.order();
  const Index q = obs.order_q;
  const Index n = sys.n();
  if (q < q1)
    throw IncompatibleDesigns("assemble_separation: observer order below controller order");
  if ((obs.Fbar.topRows(q1) - ctrl.Fbar).norm() >
      tol.absolute_zero_tol * std::max(1.0, ctrl.Fbar.norm()))
    throw IncompatibleDesigns(
        "assemble_separation: observer functional rows do not extend the controller's");

  SeparationClosedLoop loop;
  Matrix P = Matrix::Zero(q1, q);
  P.leftCols(q1) = Matrix::Identity(q1, q1);

  const Matrix controller_block = ctrl.reduced_A - ctrl.reduced_B * ctrl.Z;
  loop.Psi = Matrix::Zero(q1 + q, q1 + q);
  loop.Psi.topLeftCorner(q1, q1) = controller_block;
  loop.Psi.topRightCorner(q1, q) = ctrl.reduced_B * ctrl.Z * P;
  loop.Psi.bottomRightCorner(q, q) = obs.N;

  const Matrix Z_eff = ctrl.Z * P;  // m x q, acts on the observer estimate
  loop.A_full = Matrix::Zero(n + q, n + q);
  loop.A_full.topLeftCorner(n, n) = sys.A - sys.B * Z_eff * obs.E * sys.C;
  loop.A_full.topRightCorner(n, q) = -sys.B * Z_eff;
  loop.A_full.bottomLeftCorner(q, n) = obs.J * sys.C - obs.H * Z_eff * obs.E * sys.C;
  loop.A_full.bottomRightCorner(q, q) = obs.N - obs.H * Z_eff;

  loop.controller_block_spectrum = eigenvalues(controller_block);
  loop.observer_block_spectrum = eigenvalues(obs.N);
  loop.psi_spectrum = eigenvalues(loop.Psi);
  loop.full_spectrum = eigenvalues(loop.A_full);

  if (!spectra_match(loop.psi_spectrum,
                     spectrum_union(loop.controller_block_spectrum, loop.observer_block_spectrum),
                     tol.eigen_match_tol))
    throw ConvergenceFailure("assemble_separation: block-triangular spectrum check failed");
  // Internal sanity check only: eigenvalues of a large-gain coupled matrix
  // can wobble with its norm, so scale the match tolerance accordingly.
  if (!spectrum_contains(loop.full_spectrum,
                         spectrum_union(ctrl.assigned_poles, obs.assigned_poles),
                         tol.eigen_match_tol * std::max(1.0, loop.A_full.norm())))
    throw ConvergenceFailure("assemble_separation: assigned poles missing from the closed loop");
  return loop;
}

}  // namespace funcctl::synthesis
