#include "funcctl/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>

namespace funcctl {

// ---------------------------------------------------------------------------
// types.hpp helpers
// ---------------------------------------------------------------------------

ComplexSpectrum ComplexSpectrum::sorted() const {
  ComplexSpectrum out = *this;
  std::sort(out.values.begin(), out.values.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

bool ComplexSpectrum::closed_under_conjugation(double tol) const {
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i] || std::abs(values[i].imag()) <= tol) continue;
    bool found = false;
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (j == i || used[j]) continue;
      if (std::abs(values[j] - std::conj(values[i])) <= tol) {
        used[i] = used[j] = true;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

double ComplexSpectrum::max_real() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : values) m = std::max(m, v.real());
  return m;
}

bool spectrum_contains(const ComplexSpectrum& super, const ComplexSpectrum& sub, double tol) {
  if (sub.size() > super.size()) return false;
  std::vector<bool> used(super.values.size(), false);
  for (const auto& s : sub.values) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < super.values.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(super.values[j] - s);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (!(best <= tol)) return false;
    used[best_j] = true;
  }
  return true;
}

bool spectra_match(const ComplexSpectrum& a, const ComplexSpectrum& b, double tol) {
  return a.size() == b.size() && spectrum_contains(b, a, tol);
}

ComplexSpectrum spectrum_union(const ComplexSpectrum& a, const ComplexSpectrum& b) {
  ComplexSpectrum out = a;
  out.values.insert(out.values.end(), b.values.begin(), b.values.end());
  return out.sorted();
}

double SubspaceBasis::relative_residual(const Eigen::Ref<const Vector>& v) const {
  const double nv = v.norm();
  if (nv == 0.0) return 0.0;
  if (dimension == 0) return 1.0;
  Vector r = v - basis * (basis.transpose() * v);
  r -= basis * (basis.transpose() * r);
  return r.norm() / nv;
}

bool is_finite(const Eigen::Ref<const Matrix>& M) { return M.allFinite(); }

Matrix vstack(const std::vector<Matrix>& blocks) {
  Index rows = 0;
  Index cols = -1;
  for (const auto& b : blocks) {
    if (b.rows() == 0) continue;
    if (cols < 0)
      cols = b.cols();
    else if (b.cols() != cols)
      throw DimensionMismatch("vstack: blocks disagree on column count");
    rows += b.rows();
  }
  if (cols < 0) return Matrix(0, 0);
  Matrix out(rows, cols);
  Index at = 0;
  for (const auto& b : blocks) {
    if (b.rows() == 0) continue;
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

Matrix vstack(const Matrix& a, const Matrix& b) { return vstack(std::vector<Matrix>{a, b}); }

}  // namespace funcctl

namespace funcctl::linalg {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& M, const char* what) {
  if (!is_finite(M)) throw std::invalid_argument(std::string(what) + ": entries must be finite");
}

// Incremental orthonormal basis with twice-iterated Gram-Schmidt. Candidates
// are accepted when their residual exceeds rel_tol times the candidate norm.
class BasisBuilder {
 public:
  BasisBuilder(Index n, double rel_tol) : q_(n, 0), rel_tol_(rel_tol) {}

  bool try_accept(Vector w) {
    const double w0 = w.norm();
    if (!(w0 > 0.0)) return false;
    if (q_.cols() > 0) {
      w -= q_ * (q_.transpose() * w);
      w -= q_ * (q_.transpose() * w);
    }
    if (w.norm() <= rel_tol_ * w0) return false;
    w.normalize();
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = w;
    return true;
  }

  const Matrix& basis() const { return q_; }
  Index dimension() const { return q_.cols(); }
  double tol() const { return rel_tol_; }

 private:
  Matrix q_;
  double rel_tol_;
};

struct SchurBlock {
  Index start = 0;
  Index size = 1;  // 1 or 2
};

std::vector<SchurBlock> schur_blocks(const Matrix& T) {
  std::vector<SchurBlock> blocks;
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      blocks.push_back({i, 2});
      i += 2;
    } else {
      blocks.push_back({i, 1});
      i += 1;
    }
  }
  return blocks;
}

std::vector<Complex> block_eigenvalues(const Matrix& T, const SchurBlock& b) {
  if (b.size == 1) return {Complex(T(b.start, b.start), 0.0)};
  const double a11 = T(b.start, b.start), a12 = T(b.start, b.start + 1);
  const double a21 = T(b.start + 1, b.start), a22 = T(b.start + 1, b.start + 1);
  const double tr = a11 + a22;
  const double disc = (a11 - a22) * (a11 - a22) + 4.0 * a12 * a21;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {Complex((tr + s) / 2.0, 0.0), Complex((tr - s) / 2.0, 0.0)};
  }
  const double im = std::sqrt(-disc) / 2.0;
  return {Complex(tr / 2.0, im), Complex(tr / 2.0, -im)};
}

// Swap two adjacent diagonal blocks of a real Schur form in place,
// accumulating the transformation into U. Sizes p, q are 1 or 2.
void swap_adjacent_blocks(Matrix& T, Matrix& U, Index i, Index p, Index q) {
  const Index s = p + q;
  const Matrix A11 = T.block(i, i, p, p);
  const Matrix A12 = T.block(i, i + p, p, q);
  const Matrix A22 = T.block(i + p, i + p, q, q);

  // Sylvester equation A11 X - X A22 = A12 via its Kronecker system.
  Matrix K = Matrix::Zero(p * q, p * q);
  for (Index c = 0; c < q; ++c)
    K.block(c * p, c * p, p, p) = A11;
  for (Index c = 0; c < q; ++c)
    for (Index r = 0; r < q; ++r)
      K.block(c * p, r * p, p, p) -= A22(r, c) * Matrix::Identity(p, p);
  Eigen::FullPivLU<Matrix> lu(K);
  if (!lu.isInvertible())
    throw ConvergenceFailure("schur reorder: clusters too close to separate");
  Vector x = lu.solve(Eigen::Map<const Vector>(A12.data(), A12.size()));
  Matrix X = Eigen::Map<Matrix>(x.data(), p, q);

  // Columns of [-X; I] span the A22-invariant subspace of the window.
  Matrix W(s, q);
  W.topRows(p) = -X;
  W.bottomRows(q) = Matrix::Identity(q, q);
  Eigen::HouseholderQR<Matrix> qr(W);
  const Matrix G = qr.householderQ() * Matrix::Identity(s, s);

  T.middleRows(i, s) = (G.transpose() * T.middleRows(i, s)).eval();
  T.middleCols(i, s) = (T.middleCols(i, s) * G).eval();
  U.middleCols(i, s) = (U.middleCols(i, s) * G).eval();
  T.block(i + q, i, p, q).setZero();
}

bool matches_cluster(const std::vector<Complex>& eigs, Complex lambda, double tol) {
  const Complex conj = std::conj(lambda);
  for (const auto& e : eigs)
    if (std::abs(e - lambda) <= tol || std::abs(e - conj) <= tol) return true;
  return false;
}

Vector characteristic_coefficients(const ComplexSpectrum& poles, double pair_tol) {
  // Monic real polynomial with the requested roots, ascending coefficients.
  const Index q = static_cast<Index>(poles.size());
  Vector c = Vector::Zero(q + 1);
  c(0) = 1.0;
  Index deg = 0;
  std::vector<bool> used(poles.size(), false);
  auto mul_linear = [&](double root) {
    // c *= (x - root)
    for (Index k = deg + 1; k > 0; --k) c(k) = c(k - 1) - root * c(k);
    c(0) *= -root;
    ++deg;
  };
  auto mul_quadratic = [&](double b0, double b1) {
    // c *= (x^2 + b1 x + b0)
    Vector next = Vector::Zero(q + 1);
    for (Index k = 0; k <= deg; ++k) {
      next(k) += b0 * c(k);
      next(k + 1) += b1 * c(k);
      next(k + 2) += c(k);
    }
    c = next;
    deg += 2;
  };
  for (std::size_t i = 0; i < poles.values.size(); ++i) {
    if (used[i]) continue;
    const Complex p = poles.values[i];
    used[i] = true;
    if (std::abs(p.imag()) <= pair_tol) {
      mul_linear(p.real());
      continue;
    }
    bool paired = false;
    for (std::size_t j = i + 1; j < poles.values.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(poles.values[j] - std::conj(p)) <= pair_tol) {
        used[j] = true;
        paired = true;
        break;
      }
    }
    if (!paired) throw UnpairedComplexPole("complex pole without conjugate partner");
    mul_quadratic(std::norm(p), -2.0 * p.real());
  }
  return c;
}

Matrix matrix_polynomial(const Matrix& A, const Vector& coeffs) {
  const Index n = A.rows();
  const Index deg = coeffs.size() - 1;
  Matrix P = coeffs(deg) * Matrix::Identity(n, n);
  for (Index k = deg - 1; k >= 0; --k) {
    P = (P * A).eval();
    P.diagonal().array() += coeffs(k);
  }
  return P;
}

Matrix ackermann(const Matrix& A, const Matrix& b, const ComplexSpectrum& poles, double pair_tol) {
  const Index q = A.rows();
  Matrix W(q, q);
  Vector col = b.col(0);
  for (Index k = 0; k < q; ++k) {
    W.col(k) = col;
    col = A * col;
  }
  Eigen::FullPivLU<Matrix> lu(W);
  if (!lu.isInvertible()) throw Uncontrollable("ackermann: controllability matrix is singular");
  const Matrix phi = matrix_polynomial(A, characteristic_coefficients(poles, pair_tol));
  Matrix Z(1, q);
  Z.row(0) = (lu.inverse().row(q - 1) * phi).eval();
  return Z;
}

double spectrum_mismatch(const Matrix& Acl, const ComplexSpectrum& desired) {
  ComplexSpectrum achieved;
  try {
    achieved = eigenvalues(Acl);
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
  std::vector<bool> used(achieved.values.size(), false);
  double worst = 0.0;
  for (const Complex& want : desired.values) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < achieved.values.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(achieved.values[j] - want);
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    used[best_j] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

// One Ackermann pass on an ill-conditioned pair can miss the target
// spectrum; re-applying it to the closed loop is an exact fixed-point
// iteration (the characteristic polynomial of the solved loop annihilates
// it). Corrections are only kept while they measurably improve the match.
Matrix ackermann_refined(const Matrix& A, const Matrix& b, const ComplexSpectrum& poles,
                         double pair_tol) {
  Matrix best = ackermann(A, b, poles, pair_tol);
  double best_mismatch = spectrum_mismatch(A - b * best, poles);
  Matrix Z = best;
  for (int iter = 0; iter < 4 && best_mismatch > 0.0; ++iter) {
    Matrix correction;
    try {
      correction = ackermann(A - b * Z, b, poles, pair_tol);
    } catch (const Uncontrollable&) {
      break;
    }
    if (!is_finite(correction)) break;
    Z += correction;
    const double mismatch = spectrum_mismatch(A - b * Z, poles);
    if (mismatch < best_mismatch) {
      best = Z;
      best_mismatch = mismatch;
    } else {
      break;
    }
  }
  return best;
}

}  // namespace

Index numerical_rank(const Eigen::Ref<const Matrix>& M, const TolerancePolicy& tol) {
  tol.validate();
  if (M.size() == 0) return 0;
  require_finite(M, "numerical_rank");
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double threshold = tol.rank_scale(M.rows(), M.cols()) * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) ++rank;
  return rank;
}

Matrix right_pseudoinverse(const Eigen::Ref<const Matrix>& F, const TolerancePolicy& tol) {
  if (numerical_rank(F, tol) < F.rows())
    throw RankDeficient("right_pseudoinverse: matrix is not full row rank");
  const Matrix G = F * F.transpose();
  return F.transpose() * G.llt().solve(Matrix::Identity(F.rows(), F.rows()));
}

Matrix pseudoinverse(const Eigen::Ref<const Matrix>& M, const TolerancePolicy& tol) {
  tol.validate();
  if (M.size() == 0) return Matrix(M.cols(), M.rows());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double threshold =
      sv.size() > 0 ? tol.rank_scale(M.rows(), M.cols()) * sv(0) : 0.0;
  Vector inv = Vector::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > threshold) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

SubspaceBasis controllability_subspace(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& B,
                                       const TolerancePolicy& tol) {
  tol.validate();
  if (A.rows() != A.cols()) throw DimensionMismatch("controllability_subspace: A must be square");
  if (B.rows() != A.rows())
    throw DimensionMismatch("controllability_subspace: B row count must match A");
  require_finite(A, "controllability_subspace");
  require_finite(B, "controllability_subspace");

  const Index n = A.rows();
  BasisBuilder builder(n, tol.rank_scale(n, n));
  Matrix front = B;
  for (Index power = 0; power < n && builder.dimension() < n; ++power) {
    std::vector<Index> accepted;
    for (Index j = 0; j < front.cols(); ++j) {
      if (builder.try_accept(front.col(j))) accepted.push_back(builder.dimension() - 1);
    }
    if (accepted.empty()) break;
    Matrix next(n, static_cast<Index>(accepted.size()));
    for (std::size_t k = 0; k < accepted.size(); ++k)
      next.col(static_cast<Index>(k)) = builder.basis().col(accepted[k]);
    front = A * next;
  }
  return {builder.basis(), builder.dimension(), builder.tol()};
}

SubspaceBasis observability_subspace(const Eigen::Ref<const Matrix>& A,
                                     const Eigen::Ref<const Matrix>& C,
                                     const TolerancePolicy& tol) {
  if (A.rows() != A.cols()) throw DimensionMismatch("observability_subspace: A must be square");
  if (C.cols() != A.cols())
    throw DimensionMismatch("observability_subspace: C column count must match A");
  return controllability_subspace(A.transpose(), C.transpose(), tol);
}

ComplexSpectrum eigenvalues(const Eigen::Ref<const Matrix>& A) {
  if (A.rows() != A.cols()) throw DimensionMismatch("eigenvalues: matrix must be square");
  require_finite(A, "eigenvalues");
  if (A.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw ConvergenceFailure("eigenvalue iteration did not converge");
  ComplexSpectrum s;
  s.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + A.rows());
  return s.sorted();
}

SubspaceBasis power_image_basis(const Eigen::Ref<const Matrix>& A, Complex lambda,
                                const TolerancePolicy& tol) {
  tol.validate();
  if (A.rows() != A.cols()) throw DimensionMismatch("power_image_basis: matrix must be square");
  require_finite(A, "power_image_basis");
  const Index n = A.rows();
  if (n == 0) return {Matrix(0, 0), 0, tol.eigen_match_tol};

  Eigen::RealSchur<Matrix> schur(A);
  if (schur.info() != Eigen::Success) throw ConvergenceFailure("real Schur iteration failed");
  Matrix T = schur.matrixT();
  Matrix U = schur.matrixU();

  auto selected = [&](const SchurBlock& b) {
    return matches_cluster(block_eigenvalues(T, b), lambda, tol.eigen_match_tol);
  };

  // Bubble matching blocks to the bottom so the leading columns of U span the
  // invariant subspace of the complementary eigenvalues.
  bool moved = true;
  while (moved) {
    moved = false;
    const auto blocks = schur_blocks(T);
    for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
      if (selected(blocks[k]) && !selected(blocks[k + 1])) {
        swap_adjacent_blocks(T, U, blocks[k].start, blocks[k].size, blocks[k + 1].size);
        moved = true;
        break;
      }
    }
  }

  Index cluster = 0;
  for (const auto& b : schur_blocks(T))
    if (selected(b)) cluster += b.size;

  if (cluster == 0) return {Matrix::Identity(n, n), n, tol.eigen_match_tol};

  const Index keep = n - cluster;
  Matrix Q = U.leftCols(keep);
  // Invariance sanity check: residual of A Q outside span(Q).
  if (keep > 0) {
    const Matrix R = A * Q - Q * (Q.transpose() * (A * Q));
    if (R.norm() > 1e-8 * (1.0 + A.norm()))
      throw ConvergenceFailure("power_image_basis: invariant subspace residual too large");
  }
  return {Q, keep, tol.eigen_match_tol};
}

std::vector<int> observability_indices(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& F,
                                       const TolerancePolicy& tol) {
  tol.validate();
  if (A.rows() != A.cols()) throw DimensionMismatch("observability_indices: A must be square");
  if (F.cols() != A.cols())
    throw DimensionMismatch("observability_indices: F column count must match A");
  const Index n = A.rows();
  const Index r = F.rows();
  if (numerical_rank(F, tol) < r)
    throw RankDeficient("observability_indices: F is not full row rank");

  BasisBuilder builder(n, tol.rank_scale(n, n));
  std::vector<int> nu(static_cast<std::size_t>(r), 0);
  std::vector<bool> alive(static_cast<std::size_t>(r), true);
  Matrix rows = F;  // row i currently holds F_i A^k
  for (Index power = 0; power < n; ++power) {
    bool any = false;
    for (Index i = 0; i < r; ++i) {
      if (!alive[static_cast<std::size_t>(i)]) continue;
      if (builder.try_accept(rows.row(i).transpose())) {
        ++nu[static_cast<std::size_t>(i)];
        rows.row(i) = rows.row(i) * A;
        any = true;
      } else {
        alive[static_cast<std::size_t>(i)] = false;
      }
    }
    if (!any) break;
  }
  return nu;
}

Matrix place_poles(const Eigen::Ref<const Matrix>& Ar, const Eigen::Ref<const Matrix>& Br,
                   const ComplexSpectrum& poles, const TolerancePolicy& tol) {
  tol.validate();
  if (Ar.rows() != Ar.cols()) throw DimensionMismatch("place_poles: Ar must be square");
  if (Br.rows() != Ar.rows()) throw DimensionMismatch("place_poles: Br row count must match Ar");
  if (Br.cols() < 1) throw DimensionMismatch("place_poles: Br needs at least one column");
  const Index q = Ar.rows();
  const Index m = Br.cols();
  if (static_cast<Index>(poles.size()) != q)
    throw std::invalid_argument("place_poles: need exactly one pole per state");
  if (!poles.closed_under_conjugation(tol.eigen_match_tol))
    throw UnpairedComplexPole("place_poles: pole set not closed under conjugation");
  if (controllability_subspace(Ar, Br, tol).dimension < q)
    throw Uncontrollable("place_poles: pair is not controllable at tolerance");

  auto verified = [&](const Matrix& Z) {
    return spectra_match(eigenvalues(Ar - Br * Z), poles, tol.eigen_match_tol);
  };

  if (m == 1) {
    Matrix Z = ackermann_refined(Ar, Br, poles, tol.eigen_match_tol);
    if (!verified(Z))
      throw ConvergenceFailure(
          "place_poles: assigned spectrum differs from the request by " +
          std::to_string(spectrum_mismatch(Ar - Br * Z, poles)) +
          "; the closed loop is too ill conditioned to certify at this tolerance");
    return Z;
  }

  // Reduce to a single input: for generic g and precompensation K0 the pair
  // (Ar - Br K0, Br g) is controllable whenever (Ar, Br) is. Different
  // reductions give wildly different gain norms, so keep the smallest
  // verified gain.
  std::mt19937 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (int attempt = 0; attempt < 32; ++attempt) {
    Vector g(m);
    Matrix K0 = Matrix::Zero(m, q);
    if (attempt == 0) {
      g.setOnes();
    } else {
      for (Index i = 0; i < m; ++i) g(i) = unit(rng);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < q; ++j) K0(i, j) = unit(rng);
    }
    if (g.norm() == 0.0) continue;
    g.normalize();
    const Matrix Ashift = Ar - Br * K0;
    const Matrix bg = Br * g;
    if (controllability_subspace(Ashift, bg, tol).dimension < q) continue;
    Matrix Z;
    try {
      Z = K0 + g * ackermann_refined(Ashift, bg, poles, tol.eigen_match_tol);
    } catch (const Uncontrollable&) {
      continue;
    }
    if (verified(Z) && Z.norm() < best_norm) {
      best = Z;
      best_norm = Z.norm();
    }
  }
  if (best_norm < std::numeric_limits<double>::infinity()) return best;
  throw ConvergenceFailure("place_poles: no reduction produced the requested spectrum");
}

SubspaceBasis orthonormal_columns(const Eigen::Ref<const Matrix>& M, const TolerancePolicy& tol) {
  tol.validate();
  BasisBuilder builder(M.rows(), tol.rank_scale(M.rows(), std::max(M.cols(), M.rows())));
  for (Index j = 0; j < M.cols(); ++j) builder.try_accept(M.col(j));
  return {builder.basis(), builder.dimension(), builder.tol()};
}

SubspaceBasis subspace_sum(const SubspaceBasis& a, const SubspaceBasis& b,
                           const TolerancePolicy& tol) {
  if (a.dimension == 0) return b;
  if (b.dimension == 0) return a;
  if (a.basis.rows() != b.basis.rows())
    throw DimensionMismatch("subspace_sum: ambient dimensions differ");
  return orthonormal_columns(vstack(a.basis.transpose(), b.basis.transpose()).transpose(), tol);
}

Matrix row_space_complement(const Eigen::Ref<const Matrix>& F, const TolerancePolicy& tol) {
  tol.validate();
  const Index n = F.cols();
  Eigen::JacobiSVD<Matrix> svd(F, Eigen::ComputeFullV);
  const Index r = numerical_rank(F, tol);
  return svd.matrixV().rightCols(n - r).transpose();
}

}  // namespace funcctl::linalg
