#pragma once

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace funcctl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Error taxonomy. Everything derives from Error so callers can catch broadly;
// the CLI maps specific types onto exit codes.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch final : Error { using Error::Error; };
struct RankDeficient final : Error { using Error::Error; };
struct ConvergenceFailure final : Error { using Error::Error; };
struct Uncontrollable final : Error { using Error::Error; };
struct UnpairedComplexPole final : Error { using Error::Error; };
struct ConditionsViolated final : Error { using Error::Error; };
struct NotFunctionalObservable final : Error { using Error::Error; };
struct IncompatibleDesigns final : Error { using Error::Error; };
struct StepBudgetExceeded final : Error { using Error::Error; };
struct InconsistentVerdicts final : Error { using Error::Error; };
struct SignalUnderflow final : Error { using Error::Error; };
struct ParseError final : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Tolerances
// ---------------------------------------------------------------------------

/// Numerical tolerances shared by all rank decisions, residual checks and
/// spectrum comparisons.
///
/// relative_rank_tol is a factor applied to the largest singular value when
/// deciding numerical rank. The value 0 selects the automatic choice
/// max(rows, cols) * machine-epsilon.
struct TolerancePolicy {
  double relative_rank_tol = 0.0;
  double absolute_zero_tol = 1e-9;
  double eigen_match_tol = 1e-6;

  /// Effective relative rank factor for a matrix of the given shape.
  double rank_scale(Index rows, Index cols) const {
    if (relative_rank_tol > 0.0) return relative_rank_tol;
    const auto dim = static_cast<double>(std::max(rows, cols));
    return dim * std::numeric_limits<double>::epsilon();
  }

  /// Copy with the relative rank threshold floored at absolute_zero_tol.
  /// Rank decisions on matrices that are themselves computed (subspace
  /// bases under ill-conditioned coordinates, pseudoinverse products) carry
  /// rounding noise far above machine epsilon; the floor keeps those
  /// decisions stable.
  TolerancePolicy floored() const {
    TolerancePolicy out = *this;
    out.relative_rank_tol = std::max(out.relative_rank_tol, out.absolute_zero_tol);
    return out;
  }

  void validate() const {
    if (relative_rank_tol < 0.0 || absolute_zero_tol <= 0.0 || eigen_match_tol <= 0.0)
      throw std::invalid_argument("TolerancePolicy: tolerances must be positive");
  }
};

// ---------------------------------------------------------------------------
// Spectra
// ---------------------------------------------------------------------------

/// Multiset of complex eigenvalues. Kept as a plain vector; comparison
/// helpers below implement tolerance-aware multiset semantics.
struct ComplexSpectrum {
  std::vector<Complex> values;

  ComplexSpectrum() = default;
  explicit ComplexSpectrum(std::vector<Complex> v) : values(std::move(v)) {}

  static ComplexSpectrum reals(std::initializer_list<double> re) {
    ComplexSpectrum s;
    for (double r : re) s.values.emplace_back(r, 0.0);
    return s;
  }

  std::size_t size() const { return values.size(); }

  /// Sorted copy (by real part, then imaginary part).
  ComplexSpectrum sorted() const;

  /// True when every eigenvalue with nonzero imaginary part has a conjugate
  /// partner within tol.
  bool closed_under_conjugation(double tol) const;

  double max_real() const;
};

/// Exact-size multiset match: every value of a pairs with a distinct value of
/// b at distance <= tol.
bool spectra_match(const ComplexSpectrum& a, const ComplexSpectrum& b, double tol);

/// Multiset containment: sub embeds into super within tol.
bool spectrum_contains(const ComplexSpectrum& super, const ComplexSpectrum& sub, double tol);

ComplexSpectrum spectrum_union(const ComplexSpectrum& a, const ComplexSpectrum& b);

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

/// Orthonormal basis of a subspace of R^n. basis has n rows and `dimension`
/// columns; a zero-dimensional subspace is an n x 0 matrix.
struct SubspaceBasis {
  Matrix basis;
  Index dimension = 0;
  double tol_used = 0.0;

  /// Norm of the component of v outside the subspace, relative to |v|.
  double relative_residual(const Eigen::Ref<const Vector>& v) const;

  /// Membership at a relative residual threshold.
  bool contains(const Eigen::Ref<const Vector>& v, double rel_tol) const {
    return relative_residual(v) <= rel_tol;
  }
};

// ---------------------------------------------------------------------------
// Small matrix helpers
// ---------------------------------------------------------------------------

bool is_finite(const Eigen::Ref<const Matrix>& M);

/// Stack blocks vertically. Empty blocks (0 rows) are skipped; all nonempty
/// blocks must agree on the column count.
Matrix vstack(const std::vector<Matrix>& blocks);
Matrix vstack(const Matrix& a, const Matrix& b);

}  // namespace funcctl
