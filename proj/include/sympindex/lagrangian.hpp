#pragma once

// Lagrangian subspaces and the half-integer index of Lagrangian paths.
//
// A Lagrangian is stored as a frame: a 2m x m matrix whose columns span the
// subspace; only the column span matters.  Two ambient structures appear:
// the standard one (Omega0, J0) and the doubled "graph" space with
// coordinates (v, w), form -Omega0 on v plus Omega0 on w, which hosts graphs
// of symplectic matrices.  In both, the form matrix W and the compatible
// complex structure J satisfy W = -J, which the chart computations exploit.
//
// At a time where the moving Lagrangian meets the reference, the crossing
// form is computed in the chart over Lambda(t0) determined by a supplementary
// Lagrangian M (default J * Lambda(t0)): frames are decomposed by a linear
// solve against [F0 | FM], the chart coordinate R(t) is differentiated by a
// central (or one-sided, near corners) finite difference, and the resulting
// symmetric form is restricted to the intersection.  The index is the usual
// half-weight-at-endpoints signature sum over regular crossings; paths that
// stay inside a stratum of constant intersection dimension get index zero.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "sympindex/core.hpp"
#include "sympindex/crossings.hpp"
#include "sympindex/forms.hpp"
#include "sympindex/path.hpp"

namespace sympindex {

// ---------------------------------------------------------------------------
// Ambient structures
// ---------------------------------------------------------------------------

struct Ambient {
  int m = 0;  // Lagrangians have dimension m; the ambient space is R^{2m}
  Mat W;      // matrix of the symplectic form
  Mat J;      // compatible complex structure; both constructors give W = -J
};

inline Ambient standard_ambient(int m) { return Ambient{m, Omega0mat(m), J0(m)}; }

// Doubled space for graphs of symplectic maps on R^{2n}: block coordinates
// (v, w) with form -Omega0(v, v') + Omega0(w, w').
inline Ambient graph_ambient(int n) {
  Ambient a;
  a.m = 2 * n;
  a.W = Mat::Zero(4 * n, 4 * n);
  a.W.topLeftCorner(2 * n, 2 * n) = -Omega0mat(n);
  a.W.bottomRightCorner(2 * n, 2 * n) = Omega0mat(n);
  a.J = Mat::Zero(4 * n, 4 * n);
  a.J.topLeftCorner(2 * n, 2 * n) = -J0(n);
  a.J.bottomRightCorner(2 * n, 2 * n) = J0(n);
  return a;
}

// ---------------------------------------------------------------------------
// Lagrangian frames
// ---------------------------------------------------------------------------

struct Lagrangian {
  Mat frame;  // 2m x m, full column rank, isotropic for the ambient form
};

namespace detail {

// Orthonormal basis of the column span of F (thin QR factor).
inline Mat orthonormal_frame(const Mat& F) {
  Eigen::HouseholderQR<Mat> qr(F);
  return qr.householderQ() * Mat::Identity(static_cast<int>(F.rows()),
                                           static_cast<int>(F.cols()));
}

}  // namespace detail

inline void require_lagrangian_frame(const Mat& F, const Ambient& amb,
                                     const char* who = "Lagrangian") {
  if (F.rows() != 2 * amb.m || F.cols() != amb.m)
    throw invalid_input_error(std::string(who) + ": frame must be 2m x m for the ambient");
  Eigen::JacobiSVD<Mat> svd(F);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < 1e-10 * sv(0))
    throw invalid_input_error(std::string(who) + ": frame columns are not independent");
  const Mat Q = detail::orthonormal_frame(F);
  const double iso = (Q.transpose() * amb.W * Q).cwiseAbs().maxCoeff();
  if (iso > 1e-8) {
    std::ostringstream os;
    os << who << ": frame is not isotropic (residual " << iso << ")";
    throw invalid_input_error(os.str());
  }
}

// Graph of a symplectic matrix as a Lagrangian of the doubled space.
inline Lagrangian graph_lagrangian(const Mat& A, double sym_tol = Tolerances{}.symplectic) {
  require_symplectic(A, sym_tol, "graph_lagrangian");
  const int d = static_cast<int>(A.rows());
  Mat F(2 * d, d);
  F.topRows(d) = Mat::Identity(d, d);
  F.bottomRows(d) = A;
  return Lagrangian{std::move(F)};
}

inline Lagrangian diagonal_lagrangian(int n) {
  return graph_lagrangian(Mat::Identity(2 * n, 2 * n));
}

// {0} x R^m (span of the f-basis) in the standard ambient.
inline Lagrangian vertical_lagrangian(int m) {
  Mat F = Mat::Zero(2 * m, m);
  F.bottomRows(m) = Mat::Identity(m, m);
  return Lagrangian{std::move(F)};
}

// R^m x {0} (span of the e-basis) in the standard ambient.
inline Lagrangian horizontal_lagrangian(int m) {
  Mat F = Mat::Zero(2 * m, m);
  F.topRows(m) = Mat::Identity(m, m);
  return Lagrangian{std::move(F)};
}

// {(x, Ax)} for symmetric A in the standard ambient.
inline Lagrangian graph_of_symmetric(const Mat& A) {
  const int m = static_cast<int>(A.rows());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw invalid_input_error("graph_of_symmetric: matrix must be symmetric");
  Mat F(2 * m, m);
  F.topRows(m) = Mat::Identity(m, m);
  F.bottomRows(m) = A;
  return Lagrangian{std::move(F)};
}

// ---------------------------------------------------------------------------
// Lagrangian paths
// ---------------------------------------------------------------------------

struct LagrangianPath {
  Ambient amb;
  double a = 0.0, b = 1.0;
  std::function<Mat(double)> frame;  // any frame of Lambda(t); only the span matters
  std::vector<double> joints;        // times where the frame may have a corner
};

inline LagrangianPath lagrangian_path_from_frames(Ambient amb, double a, double b,
                                                  std::function<Mat(double)> frame,
                                                  std::vector<double> joints = {}) {
  LagrangianPath L;
  L.amb = std::move(amb);
  L.a = a;
  L.b = b;
  L.frame = std::move(frame);
  L.joints = std::move(joints);
  if (L.joints.empty()) L.joints = {a, b};
  return L;
}

// t -> Gr psi(t) in the doubled space.
inline LagrangianPath graph_path(const PathSpec& p) {
  const int d = 2 * p.n;
  auto frame = [p, d](double t) {
    Mat F(2 * d, d);
    F.topRows(d) = Mat::Identity(d, d);
    F.bottomRows(d) = p.value(t);
    return F;
  };
  return lagrangian_path_from_frames(graph_ambient(p.n), p.a, p.b, frame, p.joint_times());
}

// t -> psi(t) * L0 in the standard ambient.
inline LagrangianPath image_path(const PathSpec& p, const Lagrangian& L0) {
  require_lagrangian_frame(L0.frame, standard_ambient(p.n), "image_path reference");
  auto frame = [p, F0 = L0.frame](double t) { return Mat(p.value(t) * F0); };
  return lagrangian_path_from_frames(standard_ambient(p.n), p.a, p.b, frame, p.joint_times());
}

// Apply a fixed symplectic map of the ambient space to the whole path.
inline LagrangianPath lagrangian_transform(const LagrangianPath& L, const Mat& g) {
  LagrangianPath out = L;
  const double residual = (g.transpose() * L.amb.W * g - L.amb.W).cwiseAbs().maxCoeff();
  if (residual > 1e-8 * std::max(1.0, g.cwiseAbs().maxCoeff()))
    throw invalid_input_error("lagrangian_transform: map does not preserve the ambient form");
  out.frame = [inner = L.frame, g](double t) { return Mat(g * inner(t)); };
  return out;
}

// ---------------------------------------------------------------------------
// Intersections and the crossing form
// ---------------------------------------------------------------------------

namespace detail {

// Distance-to-intersection witness: smallest singular value of the stacked
// orthonormal frames; it vanishes exactly when the spans meet and grows
// linearly in the smallest principal angle.
inline double stacked_gap(const Mat& QL, const Mat& QR) {
  Mat S(QL.rows(), QL.cols() + QR.cols());
  S.leftCols(QL.cols()) = QL;
  S.rightCols(QR.cols()) = QR;
  return sigma_min(S);
}

// Basis of span(QL) cap span(QR) from the nullspace of the stacked frames.
// Returns (X, V): X holds orthonormal coordinate columns in the QL frame,
// V = QL * X the ambient vectors.
inline std::pair<Mat, Mat> intersection_basis(const Mat& QL, const Mat& QR, double cut) {
  Mat S(QL.rows(), QL.cols() + QR.cols());
  S.leftCols(QL.cols()) = QL;
  S.rightCols(QR.cols()) = QR;
  Eigen::JacobiSVD<Mat> svd(S, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int k = 0;
  for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
    if (sv(i) <= cut) ++k;
    else break;
  }
  if (k == 0) return {Mat(QL.cols(), 0), Mat(QL.rows(), 0)};
  // null vectors (x; y) satisfy QL x = -QR y, so the x parts span the
  // intersection in QL coordinates; orthonormalize them.
  const Mat X_raw = svd.matrixV().rightCols(k).topRows(QL.cols());
  const Mat X = orthonormal_frame(X_raw);
  return {X, Mat(QL * X)};
}

inline int intersection_dimension(const Mat& QL, const Mat& QR, double cut) {
  return static_cast<int>(intersection_basis(QL, QR, cut).first.cols());
}

// Chart coordinate of span(Ft) in the splitting F0 (+) FM: solve
// [F0 | FM] (P; Q) = Ft and return R = Q P^{-1}.
inline Mat chart_coordinate(const Mat& F0, const Mat& FM, const Mat& Ft) {
  const int m = static_cast<int>(F0.cols());
  Mat B(F0.rows(), 2 * m);
  B.leftCols(m) = F0;
  B.rightCols(m) = FM;
  Eigen::FullPivLU<Mat> lu(B);
  if (!lu.isInvertible())
    throw construction_error("crossing chart: supplementary frame is not supplementary");
  const Mat X = lu.solve(Ft);
  const Mat P = X.topRows(m);
  const Mat Q = X.bottomRows(m);
  Eigen::FullPivLU<Mat> lup(P);
  if (!lup.isInvertible())
    throw construction_error("crossing chart: path left the coordinate patch");
  return Q * lup.inverse();
}

// d/dt of the chart coordinate at t0 by finite differences.  `lo`/`hi` bound
// the smooth piece containing the relevant side(s) of t0.
inline Mat chart_derivative(const LagrangianPath& L, const Mat& F0, const Mat& FM,
                            double t0, double lo, double hi) {
  const double base = 1e-5 * std::max(1.0, L.b - L.a);
  auto R = [&](double t) { return chart_coordinate(F0, FM, L.frame(t)); };
  const double room_left = t0 - lo;
  const double room_right = hi - t0;
  // central difference when both sides fit inside the smooth piece
  const double hc = std::min({base, 0.45 * room_left, 0.45 * room_right});
  if (hc > 1e-9) return Mat((R(t0 + hc) - R(t0 - hc)) / (2.0 * hc));
  // otherwise a second-order one-sided stencil on whichever side has room
  if (room_right >= room_left) {
    const double h = std::min(base, 0.45 * room_right);
    if (h <= 1e-9) throw construction_error("crossing chart: no room to differentiate");
    return Mat((-3.0 * R(t0) + 4.0 * R(t0 + h) - R(t0 + 2.0 * h)) / (2.0 * h));
  }
  const double h = std::min(base, 0.45 * room_left);
  if (h <= 1e-9) throw construction_error("crossing chart: no room to differentiate");
  return Mat((3.0 * R(t0) - 4.0 * R(t0 - h) + R(t0 - 2.0 * h)) / (2.0 * h));
}

}  // namespace detail

struct LagrangianCrossing {
  double t = 0.0;
  double gap = 0.0;  // stacked-frame gap after refinement
  bool at_start = false;
  bool at_end = false;
  Subspace intersection;  // ambient-coordinate basis of Lambda(t) cap ref
  Mat gamma;              // crossing form in that basis
  Signature sig;
  bool regular = false;
};

// Crossing form of the moving Lagrangian against `ref` at time t, restricted
// to the intersection.  Returns (ambient intersection basis, Gram matrix).
// `supplementary`, when given, must be a Lagrangian frame supplementary to
// Lambda(t); by default J * Lambda(t) is used.  The restricted form does not
// depend on that choice.
inline std::pair<Mat, Mat> crossing_form_lagrangian(
    const LagrangianPath& L, const Lagrangian& ref, double t, const Tolerances& tol = {},
    const std::optional<Mat>& supplementary = std::nullopt) {
  const Mat F0 = detail::orthonormal_frame(L.frame(t));
  const Mat Qref = detail::orthonormal_frame(ref.frame);
  auto [X, V] = detail::intersection_basis(F0, Qref, tol.kernel_cut);
  if (X.cols() == 0)
    throw invalid_input_error("crossing_form_lagrangian: the subspaces do not meet at this time");

  Mat FM;
  if (supplementary) {
    require_lagrangian_frame(*supplementary, L.amb, "crossing form supplementary");
    FM = detail::orthonormal_frame(*supplementary);
  } else {
    FM = L.amb.J * F0;
  }
  const Mat G = F0.transpose() * L.amb.W * FM;  // identity for the default choice

  // bounds of the smooth piece around t (joints and domain ends are corners)
  double lo = L.a, hi = L.b;
  for (double s : L.joints) {
    if (s < t - 1e-12 && s > lo) lo = s;
    if (s > t + 1e-12 && s < hi) hi = s;
  }
  const bool at_corner =
      std::any_of(L.joints.begin(), L.joints.end(),
                  [&](double s) { return std::abs(s - t) <= 1e-12 && s > L.a && s < L.b; });

  Mat gamma_full;
  if (!at_corner) {
    gamma_full = G * detail::chart_derivative(L, F0, FM, t, lo, hi);
  } else {
    // one-sided forms from both flanks must agree on the intersection
    const Mat dl = G * detail::chart_derivative(L, F0, FM, t, lo, t);
    const Mat dr = G * detail::chart_derivative(L, F0, FM, t, t, hi);
    const Mat rl = X.transpose() * dl * X;
    const Mat rr = X.transpose() * dr * X;
    const double scale = std::max(1.0, rl.cwiseAbs().maxCoeff());
    if ((rl - rr).cwiseAbs().maxCoeff() > 1e-4 * scale) {
      std::ostringstream os;
      os << "crossing at a corner t = " << t
         << " where the one-sided forms disagree on the intersection";
      throw regularity_error(os.str());
    }
    gamma_full = 0.5 * (dl + dr);
  }

  const double scale = std::max(1.0, gamma_full.cwiseAbs().maxCoeff());
  const double asym = (gamma_full - gamma_full.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-4 * scale)
    throw tolerance_error("crossing form is not symmetric; frames may not be Lagrangian");
  gamma_full = 0.5 * (gamma_full + gamma_full.transpose());

  Mat gamma = X.transpose() * gamma_full * X;
  gamma = 0.5 * (gamma + gamma.transpose());
  return {V, gamma};
}

// ---------------------------------------------------------------------------
// The index
// ---------------------------------------------------------------------------

struct LagrangianReport {
  HalfInt index;
  std::vector<LagrangianCrossing> crossings;
  bool constant_stratum = false;  // whole path inside one intersection stratum
};

inline LagrangianReport rs_index_lagrangian_report(const LagrangianPath& L,
                                                   const Lagrangian& ref,
                                                   const Tolerances& tol = {}) {
  require_lagrangian_frame(ref.frame, L.amb, "rs_index_lagrangian reference");
  const Mat Qref = detail::orthonormal_frame(ref.frame);
  auto gap_of = [&](double t) {
    return detail::stacked_gap(detail::orthonormal_frame(L.frame(t)), Qref);
  };

  // smooth pieces of the domain
  std::vector<double> cuts = L.joints;
  cuts.push_back(L.a);
  cuts.push_back(L.b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             cuts.end());
  std::vector<std::pair<double, double>> pieces;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i] >= L.a - 1e-12 && cuts[i + 1] <= L.b + 1e-12 && cuts[i + 1] > cuts[i] + 1e-12)
      pieces.emplace_back(cuts[i], cuts[i + 1]);
  if (pieces.empty()) pieces.emplace_back(L.a, L.b);

  const double len = L.b - L.a;
  const double xtol = tol.time * std::max(1.0, len);

  std::vector<std::pair<double, double>> candidates;
  bool any_plateau = false;
  bool all_pieces_covered = true;
  for (const auto& [pa, pb] : pieces) {
    const int N = tol.grid;
    std::vector<double> ts(N + 1), gs(N + 1);
    for (int i = 0; i <= N; ++i) {
      ts[i] = pa + (pb - pa) * static_cast<double>(i) / N;
      gs[i] = gap_of(ts[i]);
    }
    int low_cells = 0;
    int run_start = -1;
    bool piece_has_plateau = false;
    for (int i = 0; i <= N; ++i) {
      const bool low = gs[i] < tol.crossing;
      if (low) ++low_cells;
      if (low && run_start < 0) run_start = i;
      if ((!low || i == N) && run_start >= 0) {
        const int run_end = low ? i : i - 1;
        if (run_end - run_start > 2) piece_has_plateau = true;
        run_start = -1;
      }
    }
    if (piece_has_plateau) any_plateau = true;
    if (low_cells < N + 1) all_pieces_covered = false;
    candidates.emplace_back(ts[0], gs[0]);
    candidates.emplace_back(ts[N], gs[N]);
    for (int i = 1; i < N; ++i)
      if (gs[i] <= gs[i - 1] && gs[i] <= gs[i + 1]) {
        auto [tm, gm] = golden_minimize(gap_of, ts[i - 1], ts[i + 1], xtol);
        candidates.emplace_back(tm, gm);
      }
  }

  LagrangianReport report;
  if (any_plateau || all_pieces_covered) {
    if (!all_pieces_covered)
      throw regularity_error(
          "continuum of crossings: the intersection with the reference persists on a "
          "subinterval; the crossing formula does not apply");
    // constant-stratum path: verify the dimension really is constant, then
    // apply the zero property
    const int probes = 9;
    int dim0 = -1;
    for (int i = 0; i < probes; ++i) {
      const double t = L.a + len * static_cast<double>(i) / (probes - 1);
      const int d = detail::intersection_dimension(detail::orthonormal_frame(L.frame(t)),
                                                   Qref, tol.kernel_cut);
      if (dim0 < 0) dim0 = d;
      else if (d != dim0)
        throw regularity_error(
            "continuum of crossings with varying intersection dimension");
    }
    report.constant_stratum = true;
    report.index = HalfInt(0);
    return report;
  }

  std::vector<std::pair<double, double>> hits;
  for (auto& [t, g] : candidates)
    if (g < tol.crossing) hits.emplace_back(t, g);
  if (hits.empty()) {
    report.index = HalfInt(0);
    return report;
  }
  std::sort(hits.begin(), hits.end());
  const double snap = std::max(1e3 * tol.time, 1e-7) * std::max(1.0, len);
  for (auto& [t, g] : hits) {
    if (std::abs(t - L.a) <= snap) t = L.a;
    if (std::abs(t - L.b) <= snap) t = L.b;
    // keep finite-difference stencils away from corners: a hit this close to
    // a joint is the joint
    for (double s : cuts)
      if (std::abs(t - s) <= snap) t = s;
  }
  std::vector<std::pair<double, double>> merged;
  const double mtol = tol.merge * std::max(1.0, len);
  for (const auto& h : hits) {
    if (!merged.empty() && h.first - merged.back().first <= std::max(mtol, snap)) {
      if (h.second < merged.back().second) merged.back() = h;
    } else {
      merged.push_back(h);
    }
  }

  long long twice = 0;
  for (const auto& [t, g] : merged) {
    LagrangianCrossing c;
    c.t = t;
    c.gap = g;
    c.at_start = (t == L.a);
    c.at_end = (t == L.b);
    auto [V, gamma] = crossing_form_lagrangian(L, ref, t, tol);
    c.intersection = Subspace::from_real(V);
    c.gamma = gamma;
    c.sig = form_signature(gamma, tol);
    c.regular = (c.sig.zero == 0);
    if (!c.regular) {
      std::ostringstream os;
      os << "degenerate crossing at t = " << t << " (signature " << c.sig.positive << "+/"
         << c.sig.negative << "-/" << c.sig.zero << "0)";
      throw regularity_error(os.str());
    }
    const int s = c.sig.sign();
    twice += (c.at_start || c.at_end) ? s : 2 * s;
    report.crossings.push_back(std::move(c));
  }
  report.index = HalfInt(twice);
  return report;
}

inline HalfInt rs_index_lagrangian(const LagrangianPath& L, const Lagrangian& ref,
                                   const Tolerances& tol = {}) {
  return rs_index_lagrangian_report(L, ref, tol).index;
}

// Index of t -> psi(t) * L against L, with L = {0} x R^n by default.
inline LagrangianReport rs_prime_report(const PathSpec& p, const Tolerances& tol = {},
                                        const std::optional<Lagrangian>& ref = std::nullopt) {
  const Lagrangian L0 = ref ? *ref : vertical_lagrangian(p.n);
  return rs_index_lagrangian_report(image_path(p, L0), L0, tol);
}

inline HalfInt rs_prime(const PathSpec& p, const Tolerances& tol = {},
                        const std::optional<Lagrangian>& ref = std::nullopt) {
  return rs_prime_report(p, tol, ref).index;
}

// Index of the graph path Gr psi against a reference (the diagonal by
// default); equals the half-integer index of the matrix path itself.
inline LagrangianReport rs_graph_report(const PathSpec& p, const Tolerances& tol = {},
                                        const std::optional<Lagrangian>& ref = std::nullopt) {
  const Lagrangian d = ref ? *ref : diagonal_lagrangian(p.n);
  return rs_index_lagrangian_report(graph_path(p), d, tol);
}

inline HalfInt rs_graph(const PathSpec& p, const Tolerances& tol = {},
                        const std::optional<Lagrangian>& ref = std::nullopt) {
  return rs_graph_report(p, tol, ref).index;
}

}  // namespace sympindex
