#pragma once

#include "funcctl/linalg.hpp"
#include "funcctl/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace funcctl::criteria {

/// The plant x' = A x + B u, y = C x. C is assumed full row rank.
struct SystemTriple {
  Matrix A;
  Matrix B;
  Matrix C;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index p() const { return C.rows(); }

  void validate(const TolerancePolicy& tol = {}) const;
};

/// The functional z = F x to be estimated or controlled. F full row rank.
struct FunctionalTarget {
  Matrix F;

  Index r() const { return F.rows(); }

  void validate(Index n, const TolerancePolicy& tol = {}) const;
};

/// One rank comparison backing a verdict. marginal flags decisions that fell
/// within two orders of magnitude of the threshold.
struct RankEvidence {
  std::string check;
  Index rank_lhs = 0;
  Index rank_rhs = 0;
  bool pass = false;
  bool marginal = false;
};

struct ClassicalProperties {
  bool controllable = false;
  bool stabilizable = false;
  bool observable = false;
  bool detectable = false;
};

/// All verdicts for one (system, functional) pair.
struct PropertyReport {
  bool controllable = false;
  bool stabilizable = false;
  bool observable = false;
  bool detectable = false;
  bool target_output_controllable = false;
  bool functional_controllable = false;
  bool functional_stabilizable = false;
  bool functional_observable = false;
  bool functional_detectable = false;
  std::vector<RankEvidence> ranks_evidence;
};

ClassicalProperties classical_properties(const SystemTriple& sys, const TolerancePolicy& tol = {},
                                         std::vector<RankEvidence>* evidence = nullptr);

/// rank(F * Ctrb) == rank(F): z can be steered between arbitrary values in
/// finite time.
bool is_target_output_controllable(const SystemTriple& sys, const FunctionalTarget& f,
                                   const TolerancePolicy& tol = {},
                                   std::vector<RankEvidence>* evidence = nullptr);

/// Every column of F^T lies in the controllable subspace of (A, B).
bool is_functional_controllable(const SystemTriple& sys, const FunctionalTarget& f,
                                const TolerancePolicy& tol = {},
                                std::vector<RankEvidence>* evidence = nullptr);

/// For every eigenvalue of A in the closed right half plane, F^T lies in
/// Im((lambda I - A)^n) + controllable subspace.
bool is_functional_stabilizable(const SystemTriple& sys, const FunctionalTarget& f,
                                const TolerancePolicy& tol = {},
                                std::vector<RankEvidence>* evidence = nullptr);

/// Every row of F lies in the row space of the observability matrix of (A, C).
bool is_functional_observable(const SystemTriple& sys, const FunctionalTarget& f,
                              const TolerancePolicy& tol = {},
                              std::vector<RankEvidence>* evidence = nullptr);

/// Detectability analogue: tested only at closed right half plane eigenvalues.
bool is_functional_detectable(const SystemTriple& sys, const FunctionalTarget& f,
                              const TolerancePolicy& tol = {},
                              std::vector<RankEvidence>* evidence = nullptr);

/// (A, B, C) -> (A^T, C^T, B^T). An involution.
SystemTriple dual(const SystemTriple& sys);

/// All nine verdicts plus evidence. Throws InconsistentVerdicts when an
/// implication edge between the verdicts fails, which signals a tolerance
/// problem rather than a property of the system.
PropertyReport property_report(const SystemTriple& sys, const FunctionalTarget& f,
                               const TolerancePolicy& tol = {});

}  // namespace funcctl::criteria
