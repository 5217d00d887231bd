// Shared test systems and seeded random generators.
#pragma once

#include "funcctl/criteria.hpp"
#include "funcctl/linalg.hpp"

#include <random>

namespace fixtures {

using funcctl::Complex;
using funcctl::ComplexSpectrum;
using funcctl::Index;
using funcctl::Matrix;
using funcctl::Vector;
using funcctl::criteria::FunctionalTarget;
using funcctl::criteria::SystemTriple;

// -- the worked systems -------------------------------------------------------

/// 4-state diagonal plant: two controlled states, one stable uncontrolled,
/// one unstable uncontrolled. C = B^T.
inline SystemTriple diagonal_plant() {
  Matrix A = Matrix::Zero(4, 4);
  A.diagonal() << 1, 2, -1, 3;
  Matrix B = Matrix::Zero(4, 2);
  B(0, 0) = 1;
  B(1, 1) = 1;
  return {A, B, B.transpose()};
}

/// 5-state plant that is both uncontrollable and unobservable.
inline SystemTriple coupled_plant() {
  Matrix A(5, 5);
  A << 0.25, 2.25, 0.75, -0.25, 1.50,
      2.25, 0.25, -0.25, 0.75, -1.50,
      1.75, 1.75, 0.25, 1.25, -0.50,
      -1.25, -1.25, 2.25, 1.25, 0.50,
      0, 0, 0, 0, -4.00;
  Matrix B(5, 1);
  B << 2, 0, 0, 0, 0;
  Matrix C(1, 5);
  C << 1, 1, 0, 0, 0;
  return {A, B, C};
}

inline FunctionalTarget coupled_average() {
  return {(Matrix(1, 5) << 0.5, 0.5, 0.5, 0.5, 0).finished()};
}

inline FunctionalTarget coupled_contrast() {
  return {(Matrix(1, 5) << 1.5, 1.5, -0.5, -0.5, 0).finished()};
}

/// 3-state single-input plant with an uncontrollable unit eigenvalue.
inline SystemTriple cascade_plant(const Matrix& C) {
  Matrix A(3, 3);
  A << 1, 1, 1, 0, 2, 1, 0, 0, 1;
  Matrix B(3, 1);
  B << 1, 2, 0;
  return {A, B, C};
}

inline SystemTriple cascade_plant() { return cascade_plant((Matrix(1, 3) << 1, 0, 0).finished()); }

// -- planted Kalman-form ensemble ---------------------------------------------

/// Random system assembled in block upper-triangular form
///   A = [[A_c, A_cu], [0, A_u]],   B = [B_c; 0]
/// with diagonal blocks of distinct eigenvalues. The controllable subspace is
/// exactly the leading block; uncontrollable-stable and uncontrollable-unstable
/// rows are known by construction.
struct PlantedSystem {
  SystemTriple sys;
  Index n_ctrl_stable = 0;
  Index n_ctrl_unstable = 0;
  Index n_unctrl_stable = 0;
  Index n_unctrl_unstable = 0;

  Index n() const { return n_ctrl() + n_unctrl(); }
  Index n_ctrl() const { return n_ctrl_stable + n_ctrl_unstable; }
  Index n_unctrl() const { return n_unctrl_stable + n_unctrl_unstable; }

  bool controllable_truth() const { return n_unctrl() == 0; }
  bool stabilizable_truth() const { return n_unctrl_unstable == 0; }
  bool functional_controllable_truth(const Matrix& F) const {
    return n_unctrl() == 0 || F.rightCols(n_unctrl()).norm() == 0.0;
  }
  bool functional_stabilizable_truth(const Matrix& F) const {
    return n_unctrl_unstable == 0 || F.rightCols(n_unctrl_unstable).norm() == 0.0;
  }
};

inline PlantedSystem make_planted(std::mt19937& rng) {
  std::uniform_int_distribution<int> block(0, 2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);

  PlantedSystem p;
  do {
    p.n_ctrl_stable = block(rng);
    p.n_ctrl_unstable = block(rng);
    p.n_unctrl_stable = block(rng);
    p.n_unctrl_unstable = block(rng);
  } while (p.n_ctrl() == 0 || p.n() > 6);

  const Index n = p.n();
  const Index nc = p.n_ctrl();
  Matrix A = Matrix::Zero(n, n);
  // Distinct eigenvalue grids per block keep every mode identifiable.
  Index at = 0;
  auto fill_diag = [&](Index count, double base, double step) {
    for (Index k = 0; k < count; ++k, ++at) A(at, at) = base + step * static_cast<double>(k) + jitter(rng) * 0.05;
  };
  fill_diag(p.n_ctrl_stable, -3.0, 0.4);
  fill_diag(p.n_ctrl_unstable, 0.6, 0.45);
  fill_diag(p.n_unctrl_stable, -1.2, 0.3);
  fill_diag(p.n_unctrl_unstable, 2.8, 0.5);
  // Coupling from the uncontrollable block into the controllable one keeps
  // the controllable subspace equal to the leading block.
  for (Index i = 0; i < nc; ++i)
    for (Index j = nc; j < n; ++j) A(i, j) = unit(rng);

  // m <= nc keeps B full column rank, so the dual triple stays well formed.
  std::uniform_int_distribution<int> inputs(1, static_cast<int>(std::min<Index>(2, nc)));
  Index m = inputs(rng);
  Matrix B = Matrix::Zero(n, m);
  for (;;) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(m) - 1);
    for (Index i = 0; i < nc; ++i) {
      // Every controlled mode sees at least one input column: with a distinct
      // diagonal this makes (A_c, B_c) controllable by the eigenvector test.
      const Index main = pick(rng);
      B(i, main) = (unit(rng) > 0 ? 1.0 : -1.0) * (0.5 + 0.5 * std::abs(unit(rng)));
      for (Index j = 0; j < m; ++j)
        if (j != main && unit(rng) > 0.3) B(i, j) = unit(rng);
    }
    if (funcctl::linalg::numerical_rank(B) == m) break;
    B.setZero();
  }

  Matrix C = Matrix::Zero(1, n);  // placeholder output, full criteria use F
  for (Index j = 0; j < n; ++j) C(0, j) = unit(rng);
  if (C.norm() == 0.0) C(0, 0) = 1.0;
  p.sys = {A, B, C};
  return p;
}

/// Random functional with a chosen support on the planted blocks.
inline Matrix planted_functional(const PlantedSystem& p, std::mt19937& rng, bool touch_unctrl_stable,
                                 bool touch_unctrl_unstable, Index rows_count = 1) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix F = Matrix::Zero(rows_count, p.n());
  for (Index i = 0; i < rows_count; ++i) {
    for (Index j = 0; j < p.n_ctrl(); ++j) F(i, j) = unit(rng);
    if (touch_unctrl_stable && p.n_unctrl_stable > 0)
      F(i, p.n_ctrl() + (i % p.n_unctrl_stable)) = 1.0 + std::abs(unit(rng));
    if (touch_unctrl_unstable && p.n_unctrl_unstable > 0)
      F(i, p.n_ctrl() + p.n_unctrl_stable + (i % p.n_unctrl_unstable)) = 1.0 + std::abs(unit(rng));
  }
  if (F.row(0).norm() == 0.0) F(0, 0) = 1.0;
  return F;
}

// -- random controllable pairs -------------------------------------------------

struct RandomPair {
  Matrix A;
  Matrix B;
  ComplexSpectrum poles;
};

inline RandomPair make_controllable_pair(std::mt19937& rng, Index max_n = 6, Index max_m = 2) {
  std::uniform_int_distribution<int> nd(1, static_cast<int>(max_n));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RandomPair out;
  for (;;) {
    const Index n = nd(rng);
    std::uniform_int_distribution<int> md(1, static_cast<int>(std::min(max_m, n)));
    const Index m = md(rng);
    out.A.resize(n, n);
    out.B.resize(n, m);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) out.A(i, j) = 2.0 * unit(rng);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) out.B(i, j) = unit(rng);
    if (funcctl::linalg::controllability_subspace(out.A, out.B).dimension == n) break;
  }
  // Conjugate-closed stable pole set: real poles plus at most one pair.
  // Real parts descend along a gap chain; near-multiple targets would make
  // the closed-loop spectrum too sensitive to verify at 1e-6.
  const Index n = out.A.rows();
  std::uniform_real_distribution<double> start(-1.5, -0.5);
  std::uniform_real_distribution<double> gap(0.7, 1.4);
  std::uniform_real_distribution<double> im(0.4, 2.5);
  Index left = n;
  if (n >= 2 && unit(rng) > 0.0) {
    const double a = start(rng) - 2.0, b = im(rng);
    out.poles.values.emplace_back(a, b);
    out.poles.values.emplace_back(a, -b);
    left -= 2;
  }
  double at = start(rng);
  for (Index k = 0; k < left; ++k) {
    out.poles.values.emplace_back(at, 0.0);
    at -= gap(rng);
  }
  return out;
}

// -- feasible synthesis ensemble ------------------------------------------------

/// System built so that both controller conditions hold for Fbar = [F; R1]
/// and both observer conditions hold for R = R1: A closes on Fbar by
/// construction and C spans the rows of Fbar.
struct FeasibleDesign {
  SystemTriple sys;
  FunctionalTarget f;
  Matrix R1;
  Matrix reduced_M;   // Fbar A Fbar^+ by construction
  Matrix reduced_Bc;  // Fbar B
  ComplexSpectrum controller_poles;
  ComplexSpectrum observer_poles;
};

inline ComplexSpectrum random_stable_poles(std::mt19937& rng, Index count, double lo, double hi) {
  // Real parts walk down from hi with guaranteed gaps; an optional conjugate
  // pair keeps its distance through the imaginary offset.
  std::uniform_real_distribution<double> jitter(0.0, 0.25 * (hi - lo));
  std::uniform_real_distribution<double> gap(0.6, 1.1);
  std::uniform_real_distribution<double> im(0.4, 1.5);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ComplexSpectrum poles;
  Index left = count;
  double at = hi - jitter(rng);
  if (count >= 2 && unit(rng) > 0.2) {
    const double b = im(rng);
    poles.values.emplace_back(at, b);
    poles.values.emplace_back(at, -b);
    at -= gap(rng);
    left -= 2;
  }
  for (Index k = 0; k < left; ++k) {
    poles.values.emplace_back(at, 0.0);
    at -= gap(rng);
  }
  return poles;
}

inline FeasibleDesign make_feasible_design(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<int> nd(2, 6);
  FeasibleDesign d;
  for (;;) {
    const Index n = nd(rng);
    std::uniform_int_distribution<int> qd(1, static_cast<int>(std::min<Index>(3, n - 1)));
    const Index q1 = qd(rng);
    std::uniform_int_distribution<int> rd(1, static_cast<int>(q1));
    const Index r = rd(rng);
    std::uniform_int_distribution<int> md(1, 2);
    const Index m = md(rng);

    Matrix Fbar(q1, n);
    for (Index i = 0; i < q1; ++i)
      for (Index j = 0; j < n; ++j) Fbar(i, j) = unit(rng);
    if (funcctl::linalg::numerical_rank(Fbar) < q1) continue;
    const Matrix Fplus = funcctl::linalg::right_pseudoinverse(Fbar);

    Matrix M(q1, q1), G(n, n), Bc(q1, m), Bfree(n, m);
    for (Index i = 0; i < q1; ++i)
      for (Index j = 0; j < q1; ++j) M(i, j) = 1.5 * unit(rng);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) G(i, j) = unit(rng);
    for (Index i = 0; i < q1; ++i)
      for (Index j = 0; j < m; ++j) Bc(i, j) = unit(rng);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < m; ++j) Bfree(i, j) = unit(rng);
    if (funcctl::linalg::controllability_subspace(M, Bc).dimension < q1) continue;

    const Matrix projector = Matrix::Identity(n, n) - Fplus * Fbar;
    d.sys.A = Fplus * M * Fbar + projector * G;
    d.sys.B = Fplus * Bc + projector * Bfree;
    // Output spanning the rows of Fbar keeps the observer side solvable.
    Matrix W(q1, q1);
    do {
      for (Index i = 0; i < q1; ++i)
        for (Index j = 0; j < q1; ++j) W(i, j) = unit(rng);
    } while (funcctl::linalg::numerical_rank(W) < q1);
    d.sys.C = W * Fbar;
    d.f.F = Fbar.topRows(r);
    d.R1 = Fbar.bottomRows(q1 - r);
    d.reduced_M = M;
    d.reduced_Bc = Bc;
    d.controller_poles = random_stable_poles(rng, q1, -4.0, -1.0);
    d.observer_poles = random_stable_poles(rng, q1, -8.0, -5.0);
    return d;
  }
}

/// Well-conditioned random similarity transform (condition number <= cap).
inline Matrix random_similarity(std::mt19937& rng, Index n, double condition_cap = 100.0) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix X(n, n), Y(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      X(i, j) = gauss(rng);
      Y(i, j) = gauss(rng);
    }
  const Matrix Q1 = Eigen::HouseholderQR<Matrix>(X).householderQ();
  const Matrix Q2 = Eigen::HouseholderQR<Matrix>(Y).householderQ();
  Vector scales(n);
  std::uniform_real_distribution<double> logs(0.0, std::log(std::sqrt(condition_cap)));
  for (Index i = 0; i < n; ++i) scales(i) = std::exp(logs(rng) * (i % 2 == 0 ? 1.0 : -1.0));
  return Q1 * scales.asDiagonal() * Q2;
}

}  // namespace fixtures
