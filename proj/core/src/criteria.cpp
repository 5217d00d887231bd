#include "funcctl/criteria.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace funcctl::criteria {

namespace {

using linalg::controllability_subspace;
using linalg::numerical_rank;
using linalg::observability_subspace;
using linalg::power_image_basis;
using linalg::subspace_sum;

// Distinct eigenvalues of A with Re >= 0, imaginary parts canonicalized to
// be nonnegative (conjugates give identical verdicts).
std::vector<Complex> unstable_candidates(const Matrix& A, const TolerancePolicy& tol) {
  std::vector<Complex> out;
  for (const Complex& ev : linalg::eigenvalues(A).values) {
    if (ev.real() < 0.0 || ev.imag() < 0.0) continue;
    bool duplicate = false;
    for (const Complex& seen : out)
      if (std::abs(seen - ev) <= tol.eigen_match_tol) duplicate = true;
    if (!duplicate) out.push_back(ev);
  }
  return out;
}

// Classical PBH rank test rank([lambda I - A, B]) == n, over the complexes.
bool pbh_full_rank(const Matrix& A, const Matrix& B, Complex lambda, const TolerancePolicy& tol) {
  const Index n = A.rows();
  Eigen::MatrixXcd pencil(n, n + B.cols());
  pencil.leftCols(n) = -A.cast<Complex>();
  pencil.leftCols(n).diagonal().array() += lambda;
  pencil.rightCols(B.cols()) = B.cast<Complex>();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return n == 0;
  const double threshold = tol.rank_scale(pencil.rows(), pencil.cols()) * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  return rank == n;
}

// Membership of every column of V in the subspace, with rank-pair evidence.
bool columns_in_subspace(const SubspaceBasis& S, const Matrix& V, const TolerancePolicy& tol,
                         const std::string& label, std::vector<RankEvidence>* evidence) {
  bool all_in = true;
  bool marginal = false;
  const double threshold = std::max(tol.absolute_zero_tol, S.tol_used);
  for (Index j = 0; j < V.cols(); ++j) {
    const double res = S.relative_residual(V.col(j));
    if (res > threshold) all_in = false;
    if (res > threshold / 100.0 && res < threshold * 100.0) marginal = true;
  }
  if (evidence) {
    Matrix stacked(V.rows(), S.dimension + V.cols());
    stacked.leftCols(S.dimension) = S.basis;
    for (Index j = 0; j < V.cols(); ++j) {
      const double nv = V.col(j).norm();
      stacked.col(S.dimension + j) = nv > 0.0 ? Vector(V.col(j) / nv) : Vector(V.col(j));
    }
    evidence->push_back({label, numerical_rank(stacked, tol), S.dimension, all_in, marginal});
  }
  return all_in;
}

}  // namespace

void SystemTriple::validate(const TolerancePolicy& tol) const {
  tol.validate();
  if (A.rows() != A.cols() || A.rows() < 1)
    throw DimensionMismatch("SystemTriple: A must be square and nonempty");
  if (B.rows() != A.rows() || B.cols() < 1)
    throw DimensionMismatch("SystemTriple: B must be n x m with m >= 1");
  if (C.cols() != A.cols() || C.rows() < 1)
    throw DimensionMismatch("SystemTriple: C must be p x n with p >= 1");
  if (!is_finite(A) || !is_finite(B) || !is_finite(C))
    throw std::invalid_argument("SystemTriple: entries must be finite");
  if (numerical_rank(C, tol) < C.rows())
    throw RankDeficient("SystemTriple: C must be full row rank");
}

void FunctionalTarget::validate(Index n, const TolerancePolicy& tol) const {
  if (F.cols() != n || F.rows() < 1 || F.rows() > n)
    throw DimensionMismatch("FunctionalTarget: F must be r x n with 1 <= r <= n");
  if (!is_finite(F)) throw std::invalid_argument("FunctionalTarget: entries must be finite");
  if (numerical_rank(F, tol) < F.rows())
    throw RankDeficient("FunctionalTarget: F must be full row rank");
}

ClassicalProperties classical_properties(const SystemTriple& sys, const TolerancePolicy& tol,
                                         std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  ClassicalProperties out;

  const TolerancePolicy work = tol.floored();
  const Index ctrb_dim = controllability_subspace(sys.A, sys.B, work).dimension;
  const Index obs_dim = observability_subspace(sys.A, sys.C, work).dimension;
  out.controllable = ctrb_dim == sys.n();
  out.observable = obs_dim == sys.n();

  out.stabilizable = true;
  out.detectable = true;
  for (const Complex& ev : unstable_candidates(sys.A, work)) {
    if (!pbh_full_rank(sys.A, sys.B, ev, work)) out.stabilizable = false;
    if (!pbh_full_rank(sys.A.transpose(), sys.C.transpose(), ev, work)) out.detectable = false;
  }
  if (evidence) {
    evidence->push_back({"dim Im(Ctrb) == n", ctrb_dim, sys.n(), out.controllable, false});
    evidence->push_back({"dim rowspace(Obs) == n", obs_dim, sys.n(), out.observable, false});
    evidence->push_back({"PBH [lI-A, B] full at unstable eigenvalues", sys.n(), sys.n(),
                         out.stabilizable, false});
    evidence->push_back({"PBH [lI-A; C] full at unstable eigenvalues", sys.n(), sys.n(),
                         out.detectable, false});
  }
  return out;
}

bool is_target_output_controllable(const SystemTriple& sys, const FunctionalTarget& f,
                                   const TolerancePolicy& tol,
                                   std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const TolerancePolicy work = tol.floored();
  const SubspaceBasis ctrb = controllability_subspace(sys.A, sys.B, work);
  // rank(F * Ctrb) computed against the orthonormal basis for conditioning.
  const Index lhs = numerical_rank(f.F * ctrb.basis, work);
  const Index rhs = numerical_rank(f.F, work);
  const bool pass = lhs == rhs;
  if (evidence) evidence->push_back({"rank(F*Ctrb) == rank(F)", lhs, rhs, pass, false});
  return pass;
}

bool is_functional_controllable(const SystemTriple& sys, const FunctionalTarget& f,
                                const TolerancePolicy& tol,
                                std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const TolerancePolicy work = tol.floored();
  const SubspaceBasis ctrb = controllability_subspace(sys.A, sys.B, work);
  return columns_in_subspace(ctrb, f.F.transpose(), work, "F^T within Im(Ctrb)", evidence);
}

bool is_functional_stabilizable(const SystemTriple& sys, const FunctionalTarget& f,
                                const TolerancePolicy& tol,
                                std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const TolerancePolicy work = tol.floored();
  const SubspaceBasis ctrb = controllability_subspace(sys.A, sys.B, work);
  bool pass = true;
  for (const Complex& ev : unstable_candidates(sys.A, work)) {
    const SubspaceBasis sum = subspace_sum(power_image_basis(sys.A, ev, work), ctrb, work);
    const std::string label =
        "F^T within Im((lI-A)^n)+Im(Ctrb) at l=" + std::to_string(ev.real()) +
        (ev.imag() != 0.0 ? "+" + std::to_string(ev.imag()) + "i" : "");
    if (!columns_in_subspace(sum, f.F.transpose(), work, label, evidence)) pass = false;
  }
  return pass;
}

bool is_functional_observable(const SystemTriple& sys, const FunctionalTarget& f,
                              const TolerancePolicy& tol,
                              std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const TolerancePolicy work = tol.floored();
  const SubspaceBasis obs = observability_subspace(sys.A, sys.C, work);
  return columns_in_subspace(obs, f.F.transpose(), work, "rows(F) within rowspace(Obs)", evidence);
}

bool is_functional_detectable(const SystemTriple& sys, const FunctionalTarget& f,
                              const TolerancePolicy& tol,
                              std::vector<RankEvidence>* evidence) {
  sys.validate(tol);
  f.validate(sys.n(), tol);
  const TolerancePolicy work = tol.floored();
  const SubspaceBasis obs = observability_subspace(sys.A, sys.C, work);
  bool pass = true;
  for (const Complex& ev : unstable_candidates(sys.A, work)) {
    // Row space of (lambda I - A)^n as column vectors.
    const SubspaceBasis rows = power_image_basis(sys.A.transpose(), ev, work);
    const SubspaceBasis sum = subspace_sum(rows, obs, work);
    const std::string label =
        "rows(F) within rowspace((lI-A)^n)+rowspace(Obs) at l=" + std::to_string(ev.real()) +
        (ev.imag() != 0.0 ? "+" + std::to_string(ev.imag()) + "i" : "");
    if (!columns_in_subspace(sum, f.F.transpose(), work, label, evidence)) pass = false;
  }
  return pass;
}

SystemTriple dual(const SystemTriple& sys) {
  return {sys.A.transpose(), sys.C.transpose(), sys.B.transpose()};
}

PropertyReport property_report(const SystemTriple& sys, const FunctionalTarget& f,
                               const TolerancePolicy& tol) {
  PropertyReport r;
  const ClassicalProperties cls = classical_properties(sys, tol, &r.ranks_evidence);
  r.controllable = cls.controllable;
  r.stabilizable = cls.stabilizable;
  r.observable = cls.observable;
  r.detectable = cls.detectable;
  r.target_output_controllable = is_target_output_controllable(sys, f, tol, &r.ranks_evidence);
  r.functional_controllable = is_functional_controllable(sys, f, tol, &r.ranks_evidence);
  r.functional_stabilizable = is_functional_stabilizable(sys, f, tol, &r.ranks_evidence);
  r.functional_observable = is_functional_observable(sys, f, tol, &r.ranks_evidence);
  r.functional_detectable = is_functional_detectable(sys, f, tol, &r.ranks_evidence);

  const bool consistent =
      (!r.controllable || r.functional_controllable) &&
      (!r.functional_controllable || (r.target_output_controllable && r.functional_stabilizable)) &&
      (!r.stabilizable || r.functional_stabilizable) &&
      (!r.observable || r.functional_observable) &&
      (!r.functional_observable || r.functional_detectable) &&
      (!r.detectable || r.functional_detectable);
  if (!consistent)
    throw InconsistentVerdicts(
        "property_report: implication edge violated, adjust the tolerance policy");
  return r;
}

}  // namespace funcctl::criteria
