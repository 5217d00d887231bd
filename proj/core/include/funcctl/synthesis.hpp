#pragma once

#include "funcctl/criteria.hpp"
#include "funcctl/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace funcctl::synthesis {

using criteria::FunctionalTarget;
using criteria::SystemTriple;

struct DesignOptions {
  /// Permit requested poles with nonnegative real part (normally rejected).
  bool allow_unstable_poles = false;
};

/// Functional state-feedback design u = -Z Fbar x, where Fbar stacks F on top
/// of the augmentation rows R1.
struct ControllerDesign {
  Matrix R1;         ///< (q1 - r) x n, possibly empty
  Matrix Fbar;       ///< q1 x n
  Matrix Z;          ///< m x q1
  Matrix reduced_A;  ///< Fbar A Fbar^+
  Matrix reduced_B;  ///< Fbar B
  ComplexSpectrum assigned_poles;

  Index order() const { return Fbar.rows(); }
};

/// Functional observer w' = N w + J y + H u, zhat = w + E y, estimating
/// Fbar x for Fbar = [F; R].
struct ObserverDesign {
  Matrix R;  ///< (q - r) x n, possibly empty
  Matrix Fbar;
  Index order_q = 0;
  Matrix N;  ///< q x q
  Matrix J;  ///< q x p
  Matrix H;  ///< q x m
  Matrix E;  ///< q x p
  Matrix K;  ///< q x p, auxiliary: J = K + N E
  ComplexSpectrum assigned_poles;
};

/// Solution space of the observer parameter equation Theta * Sigma = Fbar A
/// over Theta = (N | E | K).
struct SynthesisWorkspace {
  Matrix Sigma;             ///< [Fbar; CA; C], (q + 2p) x n
  Matrix Theta_particular;  ///< Fbar A Sigma^+, q x (q + 2p)
  Matrix N1;                ///< first q columns of Theta_particular
  Matrix Mfree;             ///< first q columns of I - Sigma Sigma^+
};

SynthesisWorkspace make_workspace(const SystemTriple& sys, const Matrix& Fbar,
                                  const TolerancePolicy& tol = {});

/// Residuals of the observer defining equations.
struct ObserverResidualReport {
  double constraint_residual = 0.0;  ///< |Fbar A - N Fbar - E C A - K C|
  double input_map_residual = 0.0;   ///< |H - (Fbar - E C) B|
  ComplexSpectrum n_spectrum;
  bool pass = false;
};

/// Block upper-triangular closed loop over (z_aug, estimation error) and the
/// physical closed loop over (x, w).
struct SeparationClosedLoop {
  Matrix Psi;     ///< (q1 + q) x (q1 + q)
  Matrix A_full;  ///< (n + q) x (n + q)
  ComplexSpectrum controller_block_spectrum;
  ComplexSpectrum observer_block_spectrum;
  ComplexSpectrum psi_spectrum;
  ComplexSpectrum full_spectrum;
};

enum class AugmentationStrategy { empty, index_rows, kalman_complement, full_complement };

const char* to_string(AugmentationStrategy s);

struct AugmentationAttempt {
  AugmentationStrategy strategy = AugmentationStrategy::empty;
  Index rows = 0;
  bool cond_a = false;
  bool cond_b = false;
  std::string note;
};

struct AugmentationResult {
  bool found = false;
  Matrix R;
  AugmentationStrategy strategy = AugmentationStrategy::empty;
  bool cond_a = false;
  bool cond_b = false;
  std::vector<AugmentationAttempt> attempts;
};

/// Controller existence conditions for Fbar = [F; R1]:
///   first:  rank([Fbar A; Fbar]) == rank(Fbar), checked through the residual
///           Fbar A (I - Fbar^+ Fbar) = 0;
///   second: the pair (Fbar A Fbar^+, Fbar B) is controllable.
std::pair<bool, bool> controller_conditions(const SystemTriple& sys, const FunctionalTarget& f,
                                            const Matrix& R1, const TolerancePolicy& tol = {});

ControllerDesign design_functional_controller(const SystemTriple& sys, const FunctionalTarget& f,
                                              const Matrix& R1, const ComplexSpectrum& poles,
                                              const TolerancePolicy& tol = {},
                                              const DesignOptions& options = {});

/// Observer existence conditions for Fbar = [F; R]:
///   first:  rows of Fbar A lie in the row space of [CA; C; Fbar];
///   second: the free parameter pair (N1, Mfree) allows arbitrary assignment
///           of eig(N1 + Z Mfree).
std::pair<bool, bool> observer_conditions(const SystemTriple& sys, const FunctionalTarget& f,
                                          const Matrix& R, const TolerancePolicy& tol = {});

ObserverDesign design_functional_observer(const SystemTriple& sys, const FunctionalTarget& f,
                                          const Matrix& R, const ComplexSpectrum& poles,
                                          const TolerancePolicy& tol = {},
                                          const DesignOptions& options = {});

ObserverResidualReport verify_observer(const SystemTriple& sys, const FunctionalTarget& f,
                                       const Matrix& R, const ObserverDesign& design,
                                       const TolerancePolicy& tol = {});

/// Augmentation rows from the observability indices of (A, F): for each row
/// F_i the powers F_i A, ..., F_i A^(nu_i - 1). May be empty.
Matrix build_index_augmentation(const Matrix& A, const FunctionalTarget& f,
                                const TolerancePolicy& tol = {});

/// Search R1 in a fixed order (empty, index-based rows, full row-space
/// complement) for the first candidate meeting both controller conditions.
AugmentationResult find_controller_augmentation(const SystemTriple& sys, const FunctionalTarget& f,
                                                const TolerancePolicy& tol = {});

/// Search R for the observer conditions. Fails immediately (throws
/// NotFunctionalObservable) when the functional is not observable at all.
AugmentationResult find_observer_augmentation(const SystemTriple& sys, const FunctionalTarget& f,
                                              const TolerancePolicy& tol = {});

/// Couple a controller and an observer built for the same functional. The
/// observer may estimate extra rows; its leading rows must match the
/// controller's Fbar.
SeparationClosedLoop assemble_separation(const SystemTriple& sys, const ControllerDesign& ctrl,
                                         const ObserverDesign& obs,
                                         const TolerancePolicy& tol = {});

}  // namespace funcctl::synthesis
