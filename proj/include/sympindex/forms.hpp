#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sympindex/core.hpp"
#include "sympindex/spectral.hpp"

namespace sympindex {

// A linear subspace of R^{2n} (or C^{2n}) given by an orthonormal column frame.
struct Subspace {
  int ambient = 0;
  CMat basis;  // orthonormal columns
  bool real_valued = true;

  int dim() const { return static_cast<int>(basis.cols()); }
  Mat real_basis() const {
    if (!real_valued) throw invalid_input_error("Subspace: basis is not real-valued");
    return basis.real();
  }
  static Subspace from_real(const Mat& F) {
    Subspace s;
    s.ambient = static_cast<int>(F.rows());
    s.basis = F.cast<Complex>();
    s.real_valued = true;
    return s;
  }
  static Subspace from_complex(const CMat& F) {
    Subspace s;
    s.ambient = static_cast<int>(F.rows());
    s.basis = F;
    s.real_valued = F.imag().cwiseAbs().maxCoeff() < 1e-13;
    return s;
  }
};

struct Signature {
  int positive = 0;
  int negative = 0;
  int zero = 0;
  int sign() const { return positive - negative; }  // the signature Sign(Q) = p - q
  int rank() const { return positive + negative; }
};

// Signature of a symmetric real (or Hermitian) Gram matrix.  The input is
// symmetrized first; an asymmetry beyond herm_tol (relative) is an error.
inline Signature form_signature(const CMat& gram, const Tolerances& tol = {}) {
  const int m = static_cast<int>(gram.rows());
  if (m == 0) return {};
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  const double asym = (gram - gram.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol.herm * scale) {
    std::ostringstream os;
    os << "form is not symmetric: residual " << asym << " at scale " << scale;
    throw tolerance_error(os.str());
  }
  const CMat H = 0.5 * (gram + gram.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) throw tolerance_error("symmetric eigensolve failed");
  Signature s;
  const double zcut = tol.form_zero * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (int i = 0; i < m; ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > zcut) ++s.positive;
    else if (ev < -zcut) ++s.negative;
    else ++s.zero;
  }
  return s;
}

inline Signature form_signature(const Mat& gram, const Tolerances& tol = {}) {
  return form_signature(CMat(gram.cast<Complex>()), tol);
}

// ---------------------------------------------------------------------------
// Higher-order crossing forms at an eigenvalue lambda in {+1, -1}:
//
//   Qhat_k(v, w) = Omega((A - lambda)^k v, (A - lambda)^{k-1} w)
//
// on Ker((A - lambda)^{2k}).  Symmetry on that subspace is a theorem; the
// numerical residual is checked against herm_tol.
// ---------------------------------------------------------------------------

struct QhatForm {
  int k = 1;
  Subspace space;  // Ker((A-lambda)^{2k})
  Mat gram;        // symmetrized Gram matrix in the frame of `space`
  Signature sig;
};

// All Qhat_k for k = 1..max_k (chain saturates at the full generalized
// eigenspace well before max_k = n in the symplectic setting).
inline std::vector<QhatForm> qhat_forms(const Mat& A, double lambda, int max_k,
                                        const Tolerances& tol = {}) {
  const int dim = static_cast<int>(A.rows());
  const Mat B = A - lambda * Mat::Identity(dim, dim);
  const Mat W = Omega0mat(dim / 2);
  const double kernel_floor = tol.rank_rel * std::max(1.0, A.cwiseAbs().maxCoeff());
  auto chain = staircase_chain<Mat>(B, 2 * max_k, tol.rank_rel, kernel_floor);
  std::vector<QhatForm> out;
  for (int k = 1; k <= max_k; ++k) {
    // basis of Ker(B^{2k}): chain entry 2k-1 if the chain reaches that far
    const size_t want = static_cast<size_t>(2 * k);
    Mat F;
    if (chain.empty()) F = Mat(dim, 0);
    else if (chain.size() >= want) F = chain[want - 1];
    else F = chain.back();
    QhatForm q;
    q.k = k;
    q.space = Subspace::from_real(F);
    if (F.cols() == 0) {
      q.gram = Mat(0, 0);
      out.push_back(std::move(q));
      continue;
    }
    Mat Bk1F = F;  // B^{k-1} F
    for (int i = 0; i < k - 1; ++i) Bk1F = B * Bk1F;
    const Mat BkF = B * Bk1F;
    Mat G = BkF.transpose() * W * Bk1F;
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    const double asym = (G - G.transpose()).cwiseAbs().maxCoeff();
    if (asym > tol.herm * scale) {
      std::ostringstream os;
      os << "Qhat_" << k << " asymmetry " << asym << " exceeds tolerance";
      throw tolerance_error(os.str());
    }
    q.gram = 0.5 * (G + G.transpose());
    q.sig = form_signature(q.gram, tol);
    out.push_back(std::move(q));
  }
  return out;
}

// lambda * sum_k Sign(Qhat_k); equals sum_j d_j over the lambda-blocks of the
// symplectic normal form.
inline int qhat_signature_sum(const Mat& A, double lambda, const Tolerances& tol = {}) {
  const int n = static_cast<int>(A.rows()) / 2;
  auto forms = qhat_forms(A, lambda, n, tol);
  int total = 0;
  for (const auto& f : forms) total += f.sig.sign();
  return static_cast<int>(lambda > 0 ? 1 : -1) * total;
}

// Plain signature sum (without the lambda factor), as used in the endpoint
// corrections of the extension-based half-integer index at lambda = 1.
inline int qhat_sign_correction(const Mat& A, const Tolerances& tol = {}) {
  const int n = static_cast<int>(A.rows()) / 2;
  auto forms = qhat_forms(A, 1.0, n, tol);
  int total = 0;
  for (const auto& f : forms) total += f.sig.sign();
  return total;
}

}  // namespace sympindex
