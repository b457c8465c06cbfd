#pragma once

#include <vector>

#include "sympindex/basis.hpp"
#include "sympindex/path.hpp"
#include "sympindex/spectral.hpp"

namespace sympindex {

namespace detail {

// A conjugation/inversion-closed group of eigenvalue clusters.  Its subspace
// is symplectic and the restriction of A to it is deformed independently.
struct SpectralClass {
  ClusterKind kind = ClusterKind::RealPositive;  // representative kind
  Complex lambda;                                // representative eigenvalue
  int half_dim = 0;                              // subspace dimension = 2 * half_dim
  Mat basis;                                     // real orthonormal columns
};

inline Mat real_checked(const CMat& M, const char* what) {
  const double scale = std::max(1.0, M.real().cwiseAbs().maxCoeff());
  if (M.imag().cwiseAbs().maxCoeff() > 1e-7 * scale)
    throw tolerance_error(std::string(what) + ": expected a real matrix");
  return M.real();
}

inline std::vector<SpectralClass> spectral_classes(const Mat& A, const Spectrum& sp,
                                                   const Tolerances& tol) {
  std::vector<SpectralClass> classes;
  std::vector<bool> used(sp.clusters.size(), false);

  auto partner = [&](size_t i, Complex target, const char* what) -> size_t {
    const int j = nearest_cluster(sp.clusters, target);
    const auto& cj = sp.clusters[static_cast<size_t>(j)];
    if (j < 0 || static_cast<size_t>(j) == i || used[static_cast<size_t>(j)] ||
        cj.multiplicity != sp.clusters[i].multiplicity ||
        std::abs(cj.center - target) > 1e-5 * std::max(1.0, std::abs(target))) {
      std::ostringstream os;
      os << "spectrum is not closed under " << what << " at tolerance (eigenvalue "
         << sp.clusters[i].center << ")";
      throw tolerance_error(os.str());
    }
    return static_cast<size_t>(j);
  };

  for (size_t i = 0; i < sp.clusters.size(); ++i) {
    if (used[i]) continue;
    const auto& c = sp.clusters[i];
    SpectralClass cls;
    std::vector<size_t> orbit;
    switch (c.kind) {
      case ClusterKind::One:
        throw construction_error("eigenvalue-1 cluster reached the class builder");
      case ClusterKind::MinusOne: {
        if (c.multiplicity % 2 != 0)
          throw tolerance_error("eigenvalue -1 has odd multiplicity");
        cls.kind = ClusterKind::MinusOne;
        cls.lambda = Complex(-1.0, 0.0);
        cls.half_dim = c.multiplicity / 2;
        orbit = {i};
        break;
      }
      case ClusterKind::RealPositive:
      case ClusterKind::RealNegative: {
        const size_t j = partner(i, 1.0 / c.center, "lambda -> 1/lambda");
        if (sp.clusters[j].kind != c.kind)
          throw tolerance_error("inverse-paired eigenvalue clusters have inconsistent kinds");
        cls.kind = c.kind;
        cls.lambda = (std::abs(c.center) > 1.0) ? c.center : sp.clusters[j].center;
        cls.half_dim = c.multiplicity;
        orbit = {i, j};
        break;
      }
      case ClusterKind::Circle: {
        const size_t j = partner(i, std::conj(c.center), "complex conjugation");
        if (sp.clusters[j].kind != ClusterKind::Circle)
          throw tolerance_error("conjugate of a circle cluster is not on the circle");
        cls.kind = ClusterKind::Circle;
        cls.lambda = (c.center.imag() > 0.0) ? c.center : sp.clusters[j].center;
        cls.half_dim = c.multiplicity;
        orbit = {i, j};
        break;
      }
      case ClusterKind::Quad: {
        const size_t jc = partner(i, std::conj(c.center), "complex conjugation");
        const size_t ji = partner(i, 1.0 / c.center, "lambda -> 1/lambda");
        const size_t jci = partner(i, 1.0 / std::conj(c.center), "lambda -> 1/conj(lambda)");
        if (jc == ji || jc == jci || ji == jci)
          throw tolerance_error("off-circle quadruple did not resolve into four clusters");
        cls.kind = ClusterKind::Quad;
        cls.lambda = c.center;
        for (size_t x : {i, jc, ji, jci}) {
          const Complex z = sp.clusters[x].center;
          if (z.imag() > 0.0 && std::abs(z) > 1.0) cls.lambda = z;
        }
        cls.half_dim = 2 * c.multiplicity;
        orbit = {i, jc, ji, jci};
        break;
      }
    }
    int total = 0;
    for (size_t x : orbit) {
      used[x] = true;
      total += sp.clusters[x].multiplicity;
    }
    CMat W(A.rows(), total);
    int off = 0;
    for (size_t x : orbit) {
      const auto& cx = sp.clusters[x];
      W.middleCols(off, cx.multiplicity) =
          generalized_eigenspace(A, cx.center, tol, cx.multiplicity, 2.0 * cx.width);
      off += cx.multiplicity;
    }
    cls.basis = realify_span(W, total);
    classes.push_back(std::move(cls));
  }
  return classes;
}

// Deformation of one spectral-class block to its terminal model, as three
// catenated unit legs over [0, 3]:
//   leg 1 kills the nilpotent (Jordan) part, exp((1-u) N) * semisimple;
//   leg 2 ramps eigenvalue moduli/angles (projector combinations);
//   leg 3 finishes quadruple blocks (modulus ramp) or holds.
// Negative/circle blocks end at -Id; positive/quadruple blocks end with
// semisimple spectrum {2, 1/2}.  No leg ever has eigenvalue 1.
inline PathSpec class_block_path(const Mat& B, const SpectralClass& cls, const Tolerances& tol) {
  const int dim = static_cast<int>(B.rows());
  const Mat I = Mat::Identity(dim, dim);
  const double log2 = std::log(2.0);

  auto three_legs = [&](const Mat& N, const Mat& D1, const Mat& D2) {
    PathSpec a = path_left_exp(Mat(-N), B, 0.0, 1.0);
    PathSpec b1 = D1.size() ? path_left_exp(D1, a.end_value(), 1.0, 2.0)
                            : path_constant(a.end_value(), 1.0, 2.0);
    PathSpec b2 = D2.size() ? path_left_exp(D2, b1.end_value(), 2.0, 3.0)
                            : path_constant(b1.end_value(), 2.0, 3.0);
    PathSpec out = path_catenate(path_catenate(a, b1, tol), b2, tol);
    return out;
  };

  if (cls.kind == ClusterKind::MinusOne) {
    const Mat L = Mat(-B).log();  // purely nilpotent up to roundoff
    return three_legs(L, Mat(), Mat());
  }

  // spectral data of the block itself
  const Mat Bwork = (cls.kind == ClusterKind::RealNegative) ? Mat(-B) : B;
  const Spectrum spB = cluster_spectrum(Bwork, tol);
  const auto projs = spectral_projectors(Bwork, spB, tol);
  const Mat L = Bwork.log();

  CMat SL = CMat::Zero(dim, dim);
  for (size_t c = 0; c < spB.clusters.size(); ++c)
    SL += std::log(spB.clusters[c].center) * projs[c];
  const Mat N = real_checked(CMat(L.cast<Complex>() - SL), "nilpotent part");

  switch (cls.kind) {
    case ClusterKind::RealPositive:
    case ClusterKind::RealNegative: {
      if (spB.clusters.size() != 2)
        throw tolerance_error("hyperbolic block did not split into two clusters");
      const size_t ip = (std::abs(spB.clusters[0].center) > 1.0) ? 0 : 1;
      const size_t im = 1 - ip;
      const double kp = std::log(spB.clusters[ip].center.real());
      const double km = std::log(spB.clusters[im].center.real());
      const double tp = (cls.kind == ClusterKind::RealPositive) ? log2 : 0.0;
      const CMat D = (tp - kp) * projs[ip] + (-tp - km) * projs[im];
      return three_legs(N, real_checked(D, "modulus ramp"), Mat());
    }
    case ClusterKind::Circle: {
      if (spB.clusters.size() != 2)
        throw tolerance_error("circle block did not split into two clusters");
      const double phi = std::abs(std::arg(spB.clusters[0].center));
      const Mat SLr = real_checked(SL, "rotation generator");
      const Mat D = ((M_PI - phi) / phi) * SLr;
      return three_legs(N, D, Mat());
    }
    case ClusterKind::Quad: {
      if (spB.clusters.size() != 4)
        throw tolerance_error("quadruple block did not split into four clusters");
      CMat D1 = CMat::Zero(dim, dim);
      CMat Pplus = CMat::Zero(dim, dim), Pminus = CMat::Zero(dim, dim);
      double sigma = 0.0;
      for (size_t c = 0; c < spB.clusters.size(); ++c) {
        const Complex lc = std::log(spB.clusters[c].center);
        D1 += (lc.real() - lc) * projs[c];
        if (lc.real() > 0.0) {
          Pplus += projs[c];
          sigma = lc.real();
        } else {
          Pminus += projs[c];
        }
      }
      const CMat D2 = (log2 - sigma) * (Pplus - Pminus);
      return three_legs(N, real_checked(D1, "angle ramp"), real_checked(D2, "modulus ramp"));
    }
    default:
      break;
  }
  throw construction_error("unhandled spectral class kind");
}

}  // namespace detail

// Canonical extension of an endpoint A in Sp*(2n) to the reference endpoint
// W^+ = -Id (det(Id - A) > 0) or W^- (det < 0), staying inside Sp* throughout.
// The result is a path over [0, 1] starting at A.
inline PathSpec cz_extension(const Mat& A, const Tolerances& tol = {}) {
  require_symplectic(A, 1e-6, "extension endpoint");
  const int dim = static_cast<int>(A.rows());
  const int n = dim / 2;
  const Mat I = Mat::Identity(dim, dim);
  const double kernel_floor = tol.rank_rel * std::max(1.0, A.cwiseAbs().maxCoeff());
  if (staircase_kernel<Mat>(Mat(A - I), dim, tol.rank_rel, kernel_floor).cols() > 0)
    throw invalid_input_error(
        "endpoint has eigenvalue 1 (detected by the kernel test); the integer index is "
        "undefined here - use the half-integer index instead");
  const Spectrum sp = cluster_spectrum(A, tol);
  for (const auto& c : sp.clusters)
    if (c.kind == ClusterKind::One)
      throw invalid_input_error("endpoint has an eigenvalue cluster at 1 at this tolerance");

  auto classes = detail::spectral_classes(A, sp, tol);
  int half_total = 0;
  for (const auto& c : classes) half_total += c.half_dim;
  if (half_total != n)
    throw tolerance_error("spectral classes do not fill the space");

  // adapted Darboux basis, classes in order
  Mat E(dim, n), F(dim, n);
  int off = 0;
  std::vector<int> half_dims;
  for (const auto& c : classes) {
    auto [Ec, Fc] = symplectic_gram_schmidt(c.basis, tol);
    E.middleCols(off, c.half_dim) = Ec;
    F.middleCols(off, c.half_dim) = Fc;
    half_dims.push_back(c.half_dim);
    off += c.half_dim;
  }
  Mat P(dim, dim);
  P << E, F;
  if (symplectic_residual(P) > 1e-6)
    throw tolerance_error("adapted class basis is not symplectic");
  const Mat M = P.inverse() * A * P;
  if (offblock_residual(M, half_dims) > 1e-6 * std::max(1.0, M.cwiseAbs().maxCoeff()))
    throw tolerance_error("class subspaces failed to block-diagonalize the endpoint");

  // leg 0: conjugation A -> P^{-1} A P along a path of symplectic basis changes
  PathSpec conj1 =
      path_conjugate(path_constant(A, 0.0, 1.0),
                     path_with_domain(symplectic_connect(Mat(P.inverse()), tol), 0.0, 1.0));

  // legs 1-3: per-class deformations, assembled as a direct sum
  std::vector<PathSpec> block_paths;
  off = 0;
  for (const auto& c : classes) {
    block_paths.push_back(detail::class_block_path(extract_diamond_block(M, off, c.half_dim), c, tol));
    off += c.half_dim;
  }
  PathSpec phase = block_paths.front();
  for (size_t i = 1; i < block_paths.size(); ++i) phase = path_direct_sum(phase, block_paths[i]);

  Tolerances itol = tol;
  itol.join = 1e-6;  // internal joints: offblock truncation appears here
  PathSpec full = path_catenate(conj1, phase, itol);

  // hyperbolic plane count m: positive and quadruple classes end as
  // diag(2,1/2)-planes; the rest is -Id
  int m = 0;
  for (const auto& c : classes)
    if (c.kind == ClusterKind::RealPositive || c.kind == ClusterKind::Quad) m += c.half_dim;
  const int k = n - m;

  // consistency with the determinant sign
  const double det_sign = ((I - A).determinant() >= 0.0) ? 1.0 : -1.0;
  if (det_sign != ((m % 2 == 0) ? 1.0 : -1.0))
    throw construction_error("hyperbolic plane parity contradicts sign det(Id - A)");

  Mat current = full.end_value();

  if (m > 0) {
    // second conjugation: align the surviving hyperbolic planes and the -Id
    // part with the literal reference layout (hyperbolic planes first)
    const Mat W = Omega0mat(n);
    const Mat U2 = generalized_eigenspace_real(current, 2.0, tol, m);
    const Mat Uh = generalized_eigenspace_real(current, 0.5, tol, m);
    const Mat G = U2.transpose() * W * Uh;
    Eigen::JacobiSVD<Mat> gsvd(G);
    if (gsvd.singularValues()(gsvd.singularValues().size() - 1) <
        1e-8 * gsvd.singularValues()(0))
      throw tolerance_error("hyperbolic eigenspaces pair degenerately");
    const Mat Wh = Uh * G.inverse();
    Mat T(dim, dim);
    if (k > 0) {
      const Mat Vm1 = generalized_eigenspace_real(current, -1.0, tol, 2 * k);
      auto [Em, Fm] = symplectic_gram_schmidt(Vm1, tol);
      T.leftCols(n) << U2, Em;
      T.rightCols(n) << Wh, Fm;
    } else {
      T.leftCols(n) = U2;
      T.rightCols(n) = Wh;
    }
    if (symplectic_residual(T) > 1e-6)
      throw tolerance_error("hyperbolic alignment basis is not symplectic");
    PathSpec conj2 =
        path_conjugate(path_constant(current, 0.0, 1.0),
                       path_with_domain(symplectic_connect(Mat(T.inverse()), tol), 0.0, 1.0));
    full = path_catenate(full, conj2, itol);
    current = full.end_value();

    // expected layout now: m x diag(2, 1/2) planes, then k x (-Id) planes
    Vec dref = -Vec::Ones(n), gref = -Vec::Ones(n);
    dref.head(m).setConstant(2.0);
    gref.head(m).setConstant(0.5);
    if ((current - ef_diagonal(dref, gref)).cwiseAbs().maxCoeff() > 1e-6)
      throw construction_error("alignment conjugation missed the literal layout");

    if (m > 1) {
      // pairwise merge: rotate adjacent hyperbolic planes by pi while their
      // eigenvalue moduli stay {2, 1/2}, then contract the moduli to 1
      const int p0 = (m % 2 == 1) ? 1 : 0;
      Mat Jrot = Mat::Zero(dim, dim);
      Vec dcon = Vec::Zero(n), gcon = Vec::Zero(n);
      for (int p = p0; p + 1 < m; p += 2) {
        const int q = p + 1;
        Jrot(q, p) = 1.0;
        Jrot(p, q) = -1.0;
        Jrot(n + q, n + p) = 1.0;
        Jrot(n + p, n + q) = -1.0;
        dcon(p) = dcon(q) = -std::log(2.0);
        gcon(p) = gcon(q) = std::log(2.0);
      }
      PathSpec rot = path_left_exp(Mat(M_PI * Jrot), current, 0.0, 1.0);
      PathSpec con = path_left_exp(ef_diagonal(dcon, gcon), rot.end_value(), 0.0, 1.0);
      full = path_catenate(full, path_catenate(rot, con, itol), itol);
    }
  }

  const Mat target = (m % 2 == 1) ? w_minus(n) : w_plus(n);
  if ((full.end_value() - target).cwiseAbs().maxCoeff() > 1e-6)
    throw construction_error("extension did not reach the reference endpoint");

  // guard: the whole extension must stay clear of eigenvalue 1
  PathSpec out = path_with_domain(full, 0.0, 1.0);
  for (int i = 0; i <= 128; ++i) {
    const double t = static_cast<double>(i) / 128.0;
    const Mat val = out.value(t);
    Eigen::JacobiSVD<Mat> svd(val - I);
    if (svd.singularValues()(dim - 1) < 1e-9)
      throw construction_error("extension touched eigenvalue 1 at t = " + std::to_string(t));
  }
  return out;
}

// Two-sided extension for the half-integer index: the input path (relabeled to
// [0, 1]) is flanked by unipotent-killing legs and canonical extensions,
// producing a path over [-1, 2] from one reference endpoint to another.
inline PathSpec rs_extension(const PathSpec& p, const Tolerances& tol = {}) {
  const PathSpec pn = path_with_domain(p, 0.0, 1.0);
  Tolerances itol = tol;
  itol.join = 1e-6;

  auto side_extension = [&](const Mat& A) -> PathSpec {
    // A -> (kill unipotent factor) -> (open hyperbolically) -> cz extension
    const OneSplitting s = eigen_one_splitting(A, tol);
    if (s.b == 0) return path_with_domain(cz_extension(A, tol), 0.0, 1.0);
    const Mat Pmat = s.P.m;
    const Mat Lam = s.Aone.log();
    PathSpec unip = path_left_exp(Mat(-Lam), s.Aone, 0.0, 1.0);
    const Mat Ib = Mat::Identity(2 * s.b, 2 * s.b);
    Vec db = -Vec::Ones(s.b), gb = Vec::Ones(s.b);
    PathSpec open_leg = path_left_exp(ef_diagonal(db, gb), Ib, 0.0, 1.0);
    PathSpec boneside = path_catenate(unip, open_leg, itol);  // A1 -> Id -> diag(e^-1, e)
    PathSpec block_path =
        (s.a > 0) ? path_direct_sum(path_constant(s.Astar, 0.0, 2.0), boneside) : boneside;
    PathSpec kill = path_conjugate_const(block_path, Pmat);
    PathSpec cz = cz_extension(kill.end_value(), tol);
    return path_with_domain(path_catenate(kill, path_with_domain(cz, 0.0, 2.0), itol), 0.0, 1.0);
  };

  PathSpec end_part = path_with_domain(side_extension(pn.end_value()), 1.0, 2.0);
  PathSpec start_part =
      path_with_domain(path_reverse(side_extension(pn.start_value())), -1.0, 0.0);
  return path_catenate(path_catenate(start_part, pn, itol), end_part, itol);
}

}  // namespace sympindex
