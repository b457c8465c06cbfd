#pragma once

#include <Eigen/Eigenvalues>
#include <vector>

#include "sympindex/factor.hpp"
#include "sympindex/path.hpp"
#include "sympindex/spectral.hpp"

namespace sympindex {

// Symplectic Gram-Schmidt: turns a basis of a symplectic subspace into a
// Darboux frame (E | F) with Omega(e_i, e_j) = Omega(f_i, f_j) = 0 and
// Omega(e_i, f_j) = delta_ij.  Pivoting: at each step the pair with the
// largest |Omega(v_i, v_j)| is extracted, for stability.
inline std::pair<Mat, Mat> symplectic_gram_schmidt(const Mat& V, const Tolerances& tol = {}) {
  const int dim = static_cast<int>(V.rows());
  const int n = dim / 2;
  const Mat W = Omega0mat(n);
  if (V.cols() % 2 != 0)
    throw invalid_input_error("symplectic subspace must have even dimension");
  const int m = static_cast<int>(V.cols()) / 2;
  std::vector<Vec> cols;
  cols.reserve(V.cols());
  for (int j = 0; j < V.cols(); ++j) cols.push_back(V.col(j));
  Mat E(dim, m), F(dim, m);
  for (int k = 0; k < m; ++k) {
    int bi = -1, bj = -1;
    double best = 0.0;
    for (size_t i = 0; i < cols.size(); ++i)
      for (size_t j = i + 1; j < cols.size(); ++j) {
        const double w = std::abs(cols[i].dot(W * cols[j]));
        const double scale = cols[i].norm() * cols[j].norm();
        if (scale > 0.0 && w / scale > best) {
          best = w / scale;
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
        }
      }
    if (bi < 0 || best <= 1e-10)
      throw tolerance_error("subspace is degenerate for the symplectic form");
    const Vec e = cols[bi];
    const Vec f = cols[bj] / e.dot(W * cols[bj]);
    E.col(k) = e;
    F.col(k) = f;
    cols.erase(cols.begin() + bj);
    cols.erase(cols.begin() + bi);
    for (auto& u : cols)
      u = (u - u.dot(W * f) * e + u.dot(W * e) * f).eval();
  }
  return {E, F};
}

// Extract the diamond block with e-slots [off, off+size) from a 2n x 2n matrix
// in block-diagonal (e,f)-split form.
inline Mat extract_diamond_block(const Mat& M, int off, int size) {
  const int n = static_cast<int>(M.rows()) / 2;
  Mat B(2 * size, 2 * size);
  B.topLeftCorner(size, size) = M.block(off, off, size, size);
  B.topRightCorner(size, size) = M.block(off, n + off, size, size);
  B.bottomLeftCorner(size, size) = M.block(n + off, off, size, size);
  B.bottomRightCorner(size, size) = M.block(n + off, n + off, size, size);
  return B;
}

// Largest entry of M outside the diamond blocks described by half_dims.
inline double offblock_residual(const Mat& M, const std::vector<int>& half_dims) {
  const int n = static_cast<int>(M.rows()) / 2;
  Mat mask = Mat::Zero(M.rows(), M.cols());
  int off = 0;
  for (int s : half_dims) {
    mask.block(off, off, s, s).setOnes();
    mask.block(off, n + off, s, s).setOnes();
    mask.block(n + off, off, s, s).setOnes();
    mask.block(n + off, n + off, s, s).setOnes();
    off += s;
  }
  return (M.cwiseProduct(Mat::Ones(M.rows(), M.cols()) - mask)).cwiseAbs().maxCoeff();
}

// Splitting of A in Sp(2n) along the generalized eigenspace of 1:
// P^{-1} A P = Astar (+) Aone with Aone the unipotent-at-1 factor.
struct OneSplitting {
  int a = 0;  // half-dimension of the complementary factor
  int b = 0;  // half-dimension of the eigenvalue-1 factor
  SymplecticMatrix P;
  Mat Astar;  // 2a x 2a (empty when a = 0)
  Mat Aone;   // 2b x 2b (empty when b = 0)
};

inline OneSplitting eigen_one_splitting(const Mat& A, const Tolerances& tol = {}) {
  const int dim = static_cast<int>(A.rows());
  const int n = dim / 2;
  OneSplitting out;
  const double kernel_floor = tol.rank_rel * std::max(1.0, A.cwiseAbs().maxCoeff());
  const Mat V1 =
      staircase_kernel<Mat>(Mat(A - Mat::Identity(dim, dim)), dim, tol.rank_rel, kernel_floor);
  const int d1 = static_cast<int>(V1.cols());
  if (d1 % 2 != 0)
    throw tolerance_error("generalized eigenspace of 1 has odd dimension");
  out.b = d1 / 2;
  out.a = n - out.b;
  if (out.b == 0) {
    out.P = SymplecticMatrix::identity(n);
    out.Astar = A;
    out.Aone = Mat(0, 0);
    return out;
  }
  if (out.a == 0) {
    out.P = SymplecticMatrix::identity(n);
    out.Astar = Mat(0, 0);
    out.Aone = A;
    return out;
  }
  // complementary invariant subspace: union of the other spectral clusters
  const Spectrum sp = cluster_spectrum(A, tol);
  CMat Wstar(dim, 2 * out.a);
  int off = 0;
  for (const auto& c : sp.clusters) {
    if (c.kind == ClusterKind::One) continue;
    const CMat F = generalized_eigenspace(A, c.center, tol, c.multiplicity, 2.0 * c.width);
    Wstar.middleCols(off, c.multiplicity) = F;
    off += c.multiplicity;
  }
  if (off != 2 * out.a)
    throw tolerance_error("complementary spectral multiplicities do not match");
  const Mat Vstar = realify_span(Wstar, 2 * out.a);

  auto [Es, Fs] = symplectic_gram_schmidt(Vstar, tol);
  auto [E1, F1] = symplectic_gram_schmidt(V1, tol);
  Mat P(dim, dim);
  P.leftCols(n) << Es, E1;
  P.rightCols(n) << Fs, F1;
  const double res = symplectic_residual(P);
  if (res > 1e-6)
    throw tolerance_error("adapted basis is not symplectic (residual " + std::to_string(res) + ")");
  out.P = SymplecticMatrix::unchecked(P);
  const Mat M = P.inverse() * A * P;
  const double offres = offblock_residual(M, {out.a, out.b});
  if (offres > 1e-7 * std::max(1.0, M.cwiseAbs().maxCoeff()))
    throw tolerance_error("splitting failed: off-block residual " + std::to_string(offres));
  out.Astar = extract_diamond_block(M, 0, out.a);
  out.Aone = extract_diamond_block(M, out.a, out.b);
  return out;
}

// Path in Sp(2n) from the identity to P: unitary leg through the polar factor
// (as exp(s K) with K in u(n)), then the positive-definite leg.
inline PathSpec symplectic_connect(const Mat& P, const Tolerances& tol = {}) {
  require_symplectic(P, 1e-6, "symplectic_connect target");
  const int n = static_cast<int>(P.rows()) / 2;
  const Mat U = polar_unitary(P);
  const Mat X = polar_spd_log(P);  // log of (P^T P)^{1/2}, symmetric

  const CMat Z = complex_representation(U, 1e-6);
  Eigen::ComplexSchur<CMat> schur(Z);
  if (schur.info() != Eigen::Success) throw tolerance_error("Schur decomposition failed");
  const CMat& T = schur.matrixT();
  // unitary matrices are normal: T must be (numerically) diagonal
  CMat Tdiag = T;
  Tdiag.diagonal().setZero();
  if (Tdiag.cwiseAbs().maxCoeff() > 1e-8)
    throw tolerance_error("polar factor is not normal; cannot take a unitary logarithm");
  CVec theta(n);
  for (int i = 0; i < n; ++i) theta(i) = Complex(0.0, std::arg(T(i, i)));
  const CMat Kc = schur.matrixU() * theta.asDiagonal() * schur.matrixU().adjoint();
  const Mat K = real_representation(Kc);

  PathSpec leg1 = path_left_exp(K, Mat::Identity(2 * n, 2 * n), 0.0, 0.5);
  const Mat Uend = leg1.end_value();
  PathSpec leg2 = path_left_exp(Mat(Uend * X * Uend.transpose()), Uend, 0.5, 1.0);
  PathSpec out = path_catenate(leg1, leg2, tol);
  const double endres = (out.end_value() - P).cwiseAbs().maxCoeff();
  if (endres > 1e-7 * std::max(1.0, P.cwiseAbs().maxCoeff()))
    throw construction_error("connecting path misses its target by " + std::to_string(endres));
  return out;
}

}  // namespace sympindex
