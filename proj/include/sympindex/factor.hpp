#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sympindex/core.hpp"

namespace sympindex {

// Under z = x + iy  <->  (x; y), a real 2n x 2n matrix commutes with J0 iff it
// has the block form ((X, -Y), (Y, X)); it then represents the complex matrix
// Z = X + iY.

inline double j0_commutation_residual(const Mat& M) {
  const int n = static_cast<int>(M.rows()) / 2;
  const Mat j = J0(n);
  return (M * j - j * M).cwiseAbs().maxCoeff();
}

inline CMat complex_representation(const Mat& M, double tol = 1e-9) {
  const int n = static_cast<int>(M.rows()) / 2;
  const double r = j0_commutation_residual(M);
  if (r > tol * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "matrix does not commute with J0 (residual " << r << ")";
    throw invalid_input_error(os.str());
  }
  return M.topLeftCorner(n, n).cast<Complex>() +
         Complex(0, 1) * M.bottomLeftCorner(n, n).cast<Complex>();
}

inline Mat real_representation(const CMat& Z) {
  const int n = static_cast<int>(Z.rows());
  Mat M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = Z.real();
  M.topRightCorner(n, n) = -Z.imag();
  M.bottomLeftCorner(n, n) = Z.imag();
  M.bottomRightCorner(n, n) = Z.real();
  return M;
}

// Complex determinant of a J0-commuting real matrix.
inline Complex det_complex(const Mat& M, double tol = 1e-9) {
  return complex_representation(M, tol).determinant();
}

// Orthogonal factor of the polar decomposition A = U * P (P symmetric positive
// definite).  For symplectic A the factor U is both orthogonal and symplectic,
// hence J0-commuting (a unitary in disguise).
inline Mat polar_unitary(const Mat& A) {
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// Symmetric positive-definite factor P = (A^T A)^{1/2} and its logarithm.
inline Mat polar_spd_log(const Mat& A) {
  Eigen::SelfAdjointEigenSolver<Mat> es(A.transpose() * A);
  if (es.info() != Eigen::Success) throw tolerance_error("polar factor eigensolve failed");
  const Vec lam = es.eigenvalues();
  if (lam(0) <= 0.0) throw invalid_input_error("polar factor: matrix is singular");
  Vec hl(lam.size());
  for (int i = 0; i < lam.size(); ++i) hl(i) = 0.5 * std::log(lam(i));
  return es.eigenvectors() * hl.asDiagonal() * es.eigenvectors().transpose();
}

// J0-linear part C_A = (A - J0 A J0) / 2; commutes with J0 by construction and
// is invertible for every symplectic A.
inline Mat clinear_part(const Mat& A) {
  const int n = static_cast<int>(A.rows()) / 2;
  const Mat j = J0(n);
  return 0.5 * (A - j * A * j);
}

}  // namespace sympindex
