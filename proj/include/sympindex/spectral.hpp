#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include "sympindex/core.hpp"

namespace sympindex {

// ---------------------------------------------------------------------------
// Staircase kernel chains.
//
// For B = A - lambda*Id the chain K_j = Ker(B^j) is computed without forming
// matrix powers: K_{j+1} = Ker((I - F_j F_j^*) B) where F_j is an orthonormal
// basis of K_j.  One application of B per step keeps conditioning under
// control even for defective eigenvalues.
// ---------------------------------------------------------------------------

template <typename MatT>
std::vector<MatT> staircase_chain(const MatT& B, int max_steps, double rank_rel,
                                  double abs_floor = 0.0) {
  const int m = static_cast<int>(B.rows());
  std::vector<MatT> chain;
  Eigen::JacobiSVD<MatT> svd0(B);
  const double smax = (m > 0) ? svd0.singularValues()(0) : 0.0;
  if (smax == 0.0) {  // B is exactly zero: kernel is everything
    chain.push_back(MatT::Identity(m, m));
    return chain;
  }
  const double thresh = std::max(rank_rel * smax, abs_floor);

  MatT F(m, 0);
  for (int step = 0; step < max_steps; ++step) {
    MatT M = B;
    if (F.cols() > 0) M -= F * (F.adjoint() * B);
    Eigen::JacobiSVD<MatT> svd(M, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int k = 0;
    for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
      if (sv(i) <= thresh) ++k;
      else break;
    }
    if (k <= static_cast<int>(F.cols())) break;  // stabilized
    F = svd.matrixV().rightCols(k);
    chain.push_back(F);
    if (k == m) break;
  }
  return chain;
}

template <typename MatT>
MatT staircase_kernel(const MatT& B, int max_steps, double rank_rel, double abs_floor = 0.0) {
  auto chain = staircase_chain(B, max_steps, rank_rel, abs_floor);
  if (chain.empty()) return MatT(B.rows(), 0);
  return chain.back();
}

// Orthonormal basis of the generalized eigenspace of A at lambda.  abs_floor
// widens the kernel cutoff when lambda itself is only known up to a cluster
// width.  If expected >= 0 the dimension is verified.
inline CMat generalized_eigenspace(const Mat& A, Complex lambda, const Tolerances& tol,
                                   int expected = -1, double abs_floor = 0.0) {
  const CMat B = A.cast<Complex>() - lambda * CMat::Identity(A.rows(), A.cols());
  CMat F = staircase_kernel<CMat>(B, static_cast<int>(A.rows()), tol.rank_rel, abs_floor);
  if (expected >= 0 && F.cols() != expected) {
    std::ostringstream os;
    os << "generalized eigenspace at " << lambda << " has dimension " << F.cols()
       << ", expected " << expected;
    throw tolerance_error(os.str());
  }
  return F;
}

inline Mat generalized_eigenspace_real(const Mat& A, double lambda, const Tolerances& tol,
                                       int expected = -1, double abs_floor = 0.0) {
  const Mat B = A - lambda * Mat::Identity(A.rows(), A.cols());
  Mat F = staircase_kernel<Mat>(B, static_cast<int>(A.rows()), tol.rank_rel, abs_floor);
  if (expected >= 0 && F.cols() != expected) {
    std::ostringstream os;
    os << "generalized eigenspace at " << lambda << " has dimension " << F.cols()
       << ", expected " << expected;
    throw tolerance_error(os.str());
  }
  return F;
}

// Real orthonormal basis of the real span of a conjugation-closed complex
// column family.  expected_dim is the true real dimension.
inline Mat realify_span(const CMat& W, int expected_dim, double rank_rel = 1e-10) {
  Mat R(W.rows(), 2 * W.cols());
  R << W.real(), W.imag();
  Eigen::ColPivHouseholderQR<Mat> qr(R);
  qr.setThreshold(std::max(rank_rel, 1e-12));
  const int rank = static_cast<int>(qr.rank());
  if (rank != expected_dim) {
    std::ostringstream os;
    os << "real span has rank " << rank << ", expected " << expected_dim;
    throw tolerance_error(os.str());
  }
  Mat Q = qr.householderQ() * Mat::Identity(R.rows(), rank);
  return Q;
}

// ---------------------------------------------------------------------------
// Spectrum clustering and classification.
// ---------------------------------------------------------------------------

enum class ClusterKind { One, MinusOne, RealPositive, RealNegative, Circle, Quad };

struct EigenCluster {
  Complex center{};
  std::vector<int> members;  // indices into Spectrum::eigenvalues
  int multiplicity = 0;      // algebraic multiplicity over C
  double width = 0.0;        // max distance of a member from the center
  ClusterKind kind = ClusterKind::RealPositive;
};

struct Spectrum {
  CVec eigenvalues;
  std::vector<EigenCluster> clusters;

  int dim_at(ClusterKind k) const {
    int d = 0;
    for (const auto& c : clusters)
      if (c.kind == k) d += c.multiplicity;
    return d;
  }
  bool has_one() const { return dim_at(ClusterKind::One) > 0; }
};

namespace detail {
// Diagonal similarity with exact powers of two equalizing row and column
// norms (Parlett-Reinsch).  The spectrum is preserved exactly; Schur
// iteration on badly scaled matrices can stall without it.
inline Mat balance_similarity(Mat A) {
  const int dim = static_cast<int>(A.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool converged = true;
    for (int i = 0; i < dim; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < dim; ++j) {
        if (j == i) continue;
        c += std::abs(A(j, i));
        r += std::abs(A(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if (c + r < 0.95 * s) {
        converged = false;
        A.col(i) *= f;
        A.row(i) /= f;
      }
    }
    if (converged) break;
  }
  return A;
}

inline int nearest_cluster(const std::vector<EigenCluster>& cs, Complex z) {
  int best = -1;
  double bd = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < cs.size(); ++i) {
    const double d = std::abs(cs[i].center - z);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}
}  // namespace detail

// Clusters the spectrum of a real (symplectic) matrix and classifies each
// cluster.  Eigenvalue-1 and eigenvalue-(-1) groups are detected directly via
// staircase kernels at +-1 rather than from eigensolver output: a defective
// eigenvalue scatters its computed copies over a radius far beyond any
// reasonable clustering tolerance, while the exact kernel stays cleanly
// resolvable.
inline Spectrum cluster_spectrum(const Mat& A, const Tolerances& tol = {}) {
  const int dim = static_cast<int>(A.rows());
  Spectrum sp;
  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) {
    const Mat B = detail::balance_similarity(A);
    es.compute(B, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
      es.setMaxIterations(200 * dim).compute(Mat(B.transpose()), /*computeEigenvectors=*/false);
      if (es.info() != Eigen::Success) throw tolerance_error("eigenvalue computation failed");
    }
  }
  sp.eigenvalues = es.eigenvalues();

  std::vector<int> free_idx(dim);
  std::iota(free_idx.begin(), free_idx.end(), 0);

  // The kernel cutoff must be scaled to A, not to A - lam Id: when A is within
  // roundoff of +-Id the shifted matrix is itself tiny and a relative-only
  // threshold would miss the kernel entirely.
  const double kernel_floor = tol.rank_rel * std::max(1.0, A.cwiseAbs().maxCoeff());
  auto carve = [&](double lam, ClusterKind kind) {
    const Mat B = A - lam * Mat::Identity(dim, dim);
    const Mat F = staircase_kernel<Mat>(B, dim, tol.rank_rel, kernel_floor);
    const int d = static_cast<int>(F.cols());
    if (d == 0) return;
    // hand the d eigenvalues nearest lam to this cluster
    std::sort(free_idx.begin(), free_idx.end(), [&](int a, int b) {
      return std::abs(sp.eigenvalues(a) - lam) < std::abs(sp.eigenvalues(b) - lam);
    });
    EigenCluster c;
    c.center = Complex(lam, 0.0);
    c.kind = kind;
    c.multiplicity = d;
    for (int i = 0; i < d; ++i) {
      c.members.push_back(free_idx[i]);
      c.width = std::max(c.width, std::abs(sp.eigenvalues(free_idx[i]) - lam));
    }
    free_idx.erase(free_idx.begin(), free_idx.begin() + d);
    sp.clusters.push_back(std::move(c));
  };
  carve(1.0, ClusterKind::One);
  carve(-1.0, ClusterKind::MinusOne);
  const size_t n_carved = sp.clusters.size();

  // union-find over the remaining eigenvalues
  std::vector<int> parent(free_idx.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (size_t i = 0; i < free_idx.size(); ++i)
    for (size_t j = i + 1; j < free_idx.size(); ++j) {
      const Complex a = sp.eigenvalues(free_idx[i]), b = sp.eigenvalues(free_idx[j]);
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (std::abs(a - b) <= tol.cluster * scale) parent[find(static_cast<int>(j))] = find(static_cast<int>(i));
    }
  std::map<int, EigenCluster> groups;
  for (size_t i = 0; i < free_idx.size(); ++i) {
    auto& g = groups[find(static_cast<int>(i))];
    g.members.push_back(free_idx[i]);
  }
  for (auto& [root, c] : groups) {
    Complex sum = 0.0;
    for (int idx : c.members) sum += sp.eigenvalues(idx);
    c.center = sum / static_cast<double>(c.members.size());
    c.multiplicity = static_cast<int>(c.members.size());
    for (int idx : c.members) c.width = std::max(c.width, std::abs(sp.eigenvalues(idx) - c.center));
    sp.clusters.push_back(std::move(c));
  }

  // classify the non-(+-1) clusters (the leading n_carved were assigned by carve())
  for (size_t ci = n_carved; ci < sp.clusters.size(); ++ci) {
    auto& c = sp.clusters[ci];
    const double scale = std::max(1.0, std::abs(c.center));
    const bool real_center = std::abs(c.center.imag()) <= tol.cluster * scale;
    const bool circle_candidate = std::abs(std::abs(c.center) - 1.0) <= tol.circle;
    if (circle_candidate) {
      // pairing rule: the conjugate-inverse partner of an on-circle eigenvalue
      // is the eigenvalue itself; if the partner resolves to a different
      // cluster, the pair genuinely straddles the circle and is off-circle.
      const Complex partner = 1.0 / std::conj(c.center);
      const int j = detail::nearest_cluster(sp.clusters, partner);
      const EigenCluster& pc = sp.clusters[static_cast<size_t>(j)];
      const bool self = std::abs(pc.center - c.center) < std::abs(partner - c.center) ||
                        std::abs(c.center - partner) <= tol.cluster * scale;
      if (self && real_center)
        throw tolerance_error(
            "real eigenvalue cluster within circle tolerance of +-1 but not resolved by the "
            "kernel test; input is on the boundary of Sp*(2n) at this tolerance");
      if (self) {
        c.kind = ClusterKind::Circle;
        for (int idx : c.members)
          if (std::abs(std::abs(sp.eigenvalues(idx)) - 1.0) > 10.0 * tol.circle)
            throw tolerance_error("eigenvalue cluster straddles the unit circle");
        c.center /= std::abs(c.center);  // snap onto the circle
        continue;
      }
    }
    if (real_center) {
      c.center = Complex(c.center.real(), 0.0);
      c.kind = (c.center.real() > 0.0) ? ClusterKind::RealPositive : ClusterKind::RealNegative;
    } else {
      c.kind = ClusterKind::Quad;
    }
  }

  int total = 0;
  for (const auto& c : sp.clusters) total += c.multiplicity;
  if (total != dim)
    throw tolerance_error("cluster multiplicities do not sum to the matrix dimension");
  return sp;
}

// Spectral projectors P_c = V E_c V^{-1} for the clusters of A, in cluster
// order.  Each column block of V is an orthonormal basis of the corresponding
// generalized eigenspace.
inline std::vector<CMat> spectral_projectors(const Mat& A, const Spectrum& sp,
                                             const Tolerances& tol = {}) {
  const int dim = static_cast<int>(A.rows());
  CMat V(dim, dim);
  std::vector<std::pair<int, int>> ranges;  // (offset, size) per cluster
  int off = 0;
  for (const auto& c : sp.clusters) {
    const double floor = 2.0 * c.width;
    CMat F = generalized_eigenspace(A, c.center, tol, c.multiplicity, floor);
    V.middleCols(off, c.multiplicity) = F;
    ranges.emplace_back(off, c.multiplicity);
    off += c.multiplicity;
  }
  Eigen::PartialPivLU<CMat> lu(V);
  const CMat Vinv = lu.solve(CMat::Identity(dim, dim));
  std::vector<CMat> projectors;
  projectors.reserve(sp.clusters.size());
  for (auto [o, s] : ranges)
    projectors.push_back(V.middleCols(o, s) * Vinv.middleRows(o, s));
  return projectors;
}

}  // namespace sympindex
