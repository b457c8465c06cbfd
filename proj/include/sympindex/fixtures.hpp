#pragma once

#include "sympindex/path.hpp"

namespace sympindex {

// Loop at the identity with half-integer index 2 * nwind: rotation by
// 2 pi nwind t in the first plane, direct-summed with a hyperbolic bump
// a(t) = exp(c min(t, 1-t)) (so a(0) = a(1) = 1, a != 1 inside) in each of
// the remaining planes.  All crossings (t = m/nwind) are regular.
inline PathSpec loop_phi(int nwind, int planes, double bump_rate = 1.0) {
  if (nwind < 1 || planes < 1) throw invalid_input_error("loop needs nwind >= 1, planes >= 1");
  const Mat I2 = Mat::Identity(2, 2);
  PathSpec acc = path_left_exp(Mat(2.0 * M_PI * nwind * J0(1)), I2, 0.0, 1.0);
  for (int p = 1; p < planes; ++p) {
    Vec up(1), down(1);
    up << bump_rate / 2.0;
    down << -bump_rate / 2.0;
    PathSpec rise = path_left_exp(ef_diagonal(up, down), I2, 0.0, 0.5);
    PathSpec fall = path_left_exp(ef_diagonal(down, up), rise.end_value(), 0.5, 1.0);
    acc = path_direct_sum(acc, path_catenate(rise, fall));
  }
  return acc;
}

// t -> ((Id, B0 + t (B1 - B0)), (0, Id)) as a single exact exponential
// segment (the generator is strictly upper triangular, so exp is exact).
inline PathSpec shear_linear(const Mat& B0, const Mat& B1) {
  const int nb = static_cast<int>(B0.rows());
  if ((B0 - B0.transpose()).cwiseAbs().maxCoeff() > 1e-9 ||
      (B1 - B1.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw invalid_input_error("shear blocks must be symmetric");
  Mat start = Mat::Identity(2 * nb, 2 * nb);
  start.topRightCorner(nb, nb) = B0;
  Mat X = Mat::Zero(2 * nb, 2 * nb);
  X.topRightCorner(nb, nb) = B1 - B0;
  return path_left_exp(X, start, 0.0, 1.0);
}

// t -> exp(t J0 blkdiag(0, B)) = ((Id, -t B), (0, Id)).
inline PathSpec shear_generator(const Mat& B) {
  const int nb = static_cast<int>(B.rows());
  Mat S = Mat::Zero(2 * nb, 2 * nb);
  S.bottomRightCorner(nb, nb) = B;
  return path_from_generator(S, 1.0, 0.0, 1.0);
}

inline Mat jordan_block(double lambda, int r) {
  Mat J = lambda * Mat::Identity(r, r);
  for (int i = 0; i + 1 < r; ++i) J(i, i + 1) = 1.0;
  return J;
}

// Symplectic normal-form block for eigenvalue lambda in {+1, -1}, Jordan size
// r and shear parameter d in {-1, 0, 1}:
//   ((J^{-1}, J^{-1} N_d), (0, J^T)) with N_d = diag(0, ..., 0, d).
// It is symplectic because (J^{-1})^T J^T = Id and J (J^{-1} N_d) = N_d is
// symmetric.
inline Mat normal_form_block(double lambda, int r, double d) {
  if (lambda != 1.0 && lambda != -1.0)
    throw invalid_input_error("normal-form block: lambda must be +1 or -1");
  if (r < 1) throw invalid_input_error("normal-form block: size must be positive");
  const Mat J = jordan_block(lambda, r);
  const Mat Ji = J.inverse();
  Mat Nd = Mat::Zero(r, r);
  Nd(r - 1, r - 1) = d;
  Mat A = Mat::Zero(2 * r, 2 * r);
  A.topLeftCorner(r, r) = Ji;
  A.topRightCorner(r, r) = Ji * Nd;
  A.bottomRightCorner(r, r) = J.transpose();
  return A;
}

// Bidiagonal interpolant between the Jordan block at 1 (t = 0) and
// diag(1, e, ..., e) (t = 1): first diagonal entry 1, remaining entries e^t,
// superdiagonal 1 - t.
inline Mat bidiagonal_deformation(double t, int r) {
  Mat D = std::exp(t) * Mat::Identity(r, r);
  D(0, 0) = 1.0;
  for (int i = 0; i + 1 < r; ++i) D(i, i + 1) = 1.0 - t;
  return D;
}

// Deformation of the unipotent normal-form block (eigenvalue +1, size r,
// shear parameter d) that keeps the kernel dimension of psi(t) - Id constant
// (1 when d != 0, 2 when d = 0) while moving everything except one shear
// plane off the eigenvalue 1:
//   psi(t) = ((D^{-1}, D^{-1} diag(t d, 0, .., 0, (1-t) d)), (0, D^T)).
// At t = 0 this is normal_form_block(1, r, d); at t = 1 it is the direct sum
// of the plane shear ((1, d), (0, 1)) and diag(1/e, e) hyperbolics.
inline Mat unipotent_deformation_value(double t, int r, double d) {
  const Mat D = bidiagonal_deformation(t, r);
  const Mat Di = D.inverse();
  Vec diag = Vec::Zero(r);
  diag(0) += t * d;
  diag(r - 1) += (1.0 - t) * d;  // r = 1: both shear weights share the slot
  Mat A = Mat::Zero(2 * r, 2 * r);
  A.topLeftCorner(r, r) = Di;
  A.topRightCorner(r, r) = Di * diag.asDiagonal();
  A.bottomRightCorner(r, r) = D.transpose();
  return A;
}

// The deformation above as a sampled path on [0, 1].
inline PathSpec unipotent_deformation_path(int r, double d, int samples = 128) {
  std::vector<double> times(samples + 1);
  std::vector<Mat> mats(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    times[i] = static_cast<double>(i) / samples;
    mats[i] = unipotent_deformation_value(times[i], r, d);
  }
  return path_sampled(times, mats);
}

// Full deformation from the unipotent block to a matrix without eigenvalue 1:
// the kernel-preserving leg above, then the shear plane relaxes to the
// identity, then that plane contracts hyperbolically.  The total index of the
// catenation is half the sign of d.
inline PathSpec unipotent_removal_path(int r, double d, int samples = 128) {
  PathSpec leg1 = unipotent_deformation_path(r, d, samples);
  Mat b0(1, 1), b1(1, 1);
  b0 << d;
  b1 << 0.0;
  PathSpec plane_relax = shear_linear(b0, b1);
  Vec mm(1), pp(1);
  mm << -1.0;
  pp << 1.0;
  PathSpec plane_contract = path_left_exp(ef_diagonal(mm, pp), Mat::Identity(2, 2));
  if (r == 1) return path_catenate({leg1, plane_relax, plane_contract});
  const Vec lo = -Vec::Ones(r - 1), hi = Vec::Ones(r - 1);
  const Mat rest = ef_diagonal(lo.array().exp().matrix(), hi.array().exp().matrix());
  PathSpec leg2 = path_direct_sum(plane_relax, path_constant(rest));
  PathSpec leg3 = path_direct_sum(plane_contract, path_constant(rest));
  return path_catenate({leg1, leg2, leg3});
}

}  // namespace sympindex
