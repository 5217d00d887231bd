#pragma once

#include "funcctl/types.hpp"

namespace funcctl::linalg {

/// Number of singular values exceeding the rank threshold
/// (tol.rank_scale(...) times the largest singular value).
Index numerical_rank(const Eigen::Ref<const Matrix>& M, const TolerancePolicy& tol = {});

/// Moore-Penrose right inverse F^T (F F^T)^{-1} of a full-row-rank matrix.
/// Satisfies F * right_pseudoinverse(F) = I. Throws RankDeficient otherwise.
Matrix right_pseudoinverse(const Eigen::Ref<const Matrix>& F, const TolerancePolicy& tol = {});

/// Moore-Penrose pseudoinverse with singular values below the rank threshold
/// treated as zero.
Matrix pseudoinverse(const Eigen::Ref<const Matrix>& M, const TolerancePolicy& tol = {});

/// Orthonormal basis of the image of [B, AB, A^2 B, ...], grown one power at
/// a time with re-orthogonalization. The n-th power is never formed.
SubspaceBasis controllability_subspace(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& B,
                                       const TolerancePolicy& tol = {});

/// Orthonormal basis of the row space of [C; CA; CA^2; ...], returned as
/// column vectors. Identical to controllability_subspace(A^T, C^T).
SubspaceBasis observability_subspace(const Eigen::Ref<const Matrix>& A,
                                     const Eigen::Ref<const Matrix>& C,
                                     const TolerancePolicy& tol = {});

/// Full eigenvalue multiset of a square matrix, sorted by (re, im).
ComplexSpectrum eigenvalues(const Eigen::Ref<const Matrix>& A);

/// Orthonormal basis of Im((lambda I - A)^n): the invariant subspace spanned
/// by the generalized eigenspaces of every eigenvalue other than lambda (and
/// its conjugate). Computed through an ordered real Schur form, not matrix
/// powers. Equals the full space when lambda is not an eigenvalue.
SubspaceBasis power_image_basis(const Eigen::Ref<const Matrix>& A, Complex lambda,
                                const TolerancePolicy& tol = {});

/// Observability indices [nu_1, ..., nu_r] of the pair (A, F) under
/// power-major selection: rows F_i A^k are admitted in order of increasing k,
/// and within one power in row order, whenever independent of everything
/// admitted before. Requires F full row rank.
std::vector<int> observability_indices(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& F,
                                       const TolerancePolicy& tol = {});

/// State-feedback gain Z with eigenvalues(Ar - Br Z) equal to the requested
/// poles. Single-input pairs use Ackermann's formula (unique gain); wider
/// input maps are reduced to a single input through a deterministic seeded
/// precompensation and verified against the requested spectrum.
Matrix place_poles(const Eigen::Ref<const Matrix>& Ar, const Eigen::Ref<const Matrix>& Br,
                   const ComplexSpectrum& poles, const TolerancePolicy& tol = {});

// -- support utilities -------------------------------------------------------

/// Orthonormal basis of the column space of M (same acceptance rule as the
/// Krylov routines).
SubspaceBasis orthonormal_columns(const Eigen::Ref<const Matrix>& M,
                                  const TolerancePolicy& tol = {});

/// Orthonormal basis of the sum of two subspaces.
SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b,
                           const TolerancePolicy& tol = {});

/// Rows spanning the orthogonal complement of the row space of F.
Matrix row_space_complement(const Eigen::Ref<const Matrix>& F, const TolerancePolicy& tol = {});

}  // namespace funcctl::linalg
