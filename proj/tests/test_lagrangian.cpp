// Lagrangian frames, crossing forms against a reference subspace, and the
// half-integer index of Lagrangian paths: graph paths reproduce the matrix
// index, vertical-image paths give the second (non-coinciding) index, and
// the localization, naturality, zero, catenation and product properties hold.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sympindex/crossings.hpp"
#include "sympindex/fixtures.hpp"
#include "sympindex/index.hpp"
#include "sympindex/lagrangian.hpp"
#include "sympindex/random.hpp"

using namespace sympindex;

namespace {

// exact half-signature of a symmetric matrix, as twice-the-value
long long signature_of(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));
  long long sig = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > 1e-9) ++sig;
    else if (ev < -1e-9) --sig;
  }
  return sig;
}

PathSpec lower_shear_path() {
  Mat S = Mat::Zero(2, 2);
  S(0, 0) = 1.0;  // exp(t J0 S) = ((1,0),(t,1))
  return path_from_generator(S);
}

Mat quarter_turn() {
  Mat phi(2, 2);
  phi << 0.0, 1.0, -1.0, 0.0;
  return phi;
}

LagrangianPath symmetric_graph_family(int m, const std::function<Mat(double)>& A) {
  auto frame = [m, A](double t) {
    Mat F(2 * m, m);
    F.topRows(m) = Mat::Identity(m, m);
    F.bottomRows(m) = A(t);
    return F;
  };
  return lagrangian_path_from_frames(standard_ambient(m), 0.0, 1.0, frame);
}

}  // namespace

TEST_CASE("frames: graphs, verticals, and validation") {
  // the diagonal is the graph of the identity and is isotropic in the
  // doubled space
  const Lagrangian diag2 = diagonal_lagrangian(2);
  REQUIRE_NOTHROW(require_lagrangian_frame(diag2.frame, graph_ambient(2)));

  // the graph of -Id is supplementary to the diagonal
  const Lagrangian anti = graph_lagrangian(-Mat::Identity(4, 4));
  Mat stacked(8, 8);
  stacked.leftCols(4) = detail::orthonormal_frame(diag2.frame);
  stacked.rightCols(4) = detail::orthonormal_frame(anti.frame);
  REQUIRE(sigma_min(stacked) > 0.1);

  // non-symplectic matrices have no Lagrangian graph
  Mat bad = Mat::Identity(4, 4);
  bad(0, 0) = 2.0;
  REQUIRE_THROWS_AS(graph_lagrangian(bad), invalid_input_error);

  // vertical and horizontal subspaces are Lagrangian and supplementary
  const Lagrangian v = vertical_lagrangian(3);
  const Lagrangian h = horizontal_lagrangian(3);
  REQUIRE_NOTHROW(require_lagrangian_frame(v.frame, standard_ambient(3)));
  REQUIRE_NOTHROW(require_lagrangian_frame(h.frame, standard_ambient(3)));
  Mat vh(6, 6);
  vh.leftCols(3) = v.frame;
  vh.rightCols(3) = h.frame;
  REQUIRE(sigma_min(vh) > 0.9);

  // a frame containing a conjugate pair (e1, f1) is not isotropic
  Mat not_iso = Mat::Zero(4, 2);
  not_iso(0, 0) = 1.0;  // e1
  not_iso(2, 1) = 1.0;  // f1
  REQUIRE_THROWS_AS(require_lagrangian_frame(not_iso, standard_ambient(2)),
                    invalid_input_error);

  // graphs of non-symmetric matrices are rejected as Lagrangians
  Mat ns(2, 2);
  ns << 0.0, 1.0, 2.0, 0.0;
  REQUIRE_THROWS_AS(graph_of_symmetric(ns), invalid_input_error);
}

TEST_CASE("localization: graphs of symmetric families against the horizontal") {
  for (int m = 1; m <= 3; ++m) {
    CAPTURE(m);
    // A(t) = (t - 1/2) Id crosses zero once, with positive velocity
    auto up = symmetric_graph_family(
        m, [m](double t) { return Mat((t - 0.5) * Mat::Identity(m, m)); });
    REQUIRE(rs_index_lagrangian(up, horizontal_lagrangian(m)) == HalfInt::from_int(m));

    // decreasing family: index flips sign
    auto down = symmetric_graph_family(
        m, [m](double t) { return Mat((0.5 - t) * Mat::Identity(m, m)); });
    REQUIRE(rs_index_lagrangian(down, horizontal_lagrangian(m)) == HalfInt::from_int(-m));

    // crossing at the start counts half
    auto from_zero = symmetric_graph_family(
        m, [m](double t) { return Mat(t * Mat::Identity(m, m)); });
    REQUIRE(rs_index_lagrangian(from_zero, horizontal_lagrangian(m)) == HalfInt(m));
  }

  // staggered crossing times accumulate one by one
  auto staggered = symmetric_graph_family(2, [](double t) {
    Vec d(2);
    d << t - 0.3, t - 0.7;
    return Mat(d.asDiagonal());
  });
  const auto rep = rs_index_lagrangian_report(staggered, horizontal_lagrangian(2));
  REQUIRE(rep.index == HalfInt::from_int(2));
  REQUIRE(rep.crossings.size() == 2);
  REQUIRE(rep.crossings[0].t == Catch::Approx(0.3).margin(1e-6));
  REQUIRE(rep.crossings[1].t == Catch::Approx(0.7).margin(1e-6));
}

TEST_CASE("crossing forms on graph paths match the generator restriction") {
  // rotation: at t = 0 the graph meets the diagonal fully and the form is
  // positive definite, like the generator S = pi Id
  const PathSpec rot = path_from_generator(Mat(M_PI * Mat::Identity(2, 2)));
  auto [v_rot, gamma_rot] = crossing_form_lagrangian(graph_path(rot), diagonal_lagrangian(1), 0.0);
  REQUIRE(gamma_rot.rows() == 2);
  REQUIRE(form_signature(gamma_rot).positive == 2);
  REQUIRE(form_signature(gamma_rot).zero == 0);

  // mixed-signature generator: the restricted form inherits (1+, 1-)
  Vec sd(2);
  sd << 1.0, -1.0;
  const PathSpec hyp = path_from_generator(Mat(sd.asDiagonal()));
  auto [v_h, gamma_h] = crossing_form_lagrangian(graph_path(hyp), diagonal_lagrangian(1), 0.0);
  const auto sig_h = form_signature(gamma_h);
  REQUIRE(sig_h.positive == 1);
  REQUIRE(sig_h.negative == 1);
  REQUIRE(sig_h.zero == 0);

  // the restricted form does not depend on the supplementary Lagrangian:
  // recompute with Gr(-psi(t0)) instead of J * Lambda(t0)
  const Mat alt = graph_lagrangian(Mat(-rot.value(0.0))).frame;
  auto [v_alt, gamma_alt] =
      crossing_form_lagrangian(graph_path(rot), diagonal_lagrangian(1), 0.0, {}, alt);
  REQUIRE((gamma_alt - gamma_rot).cwiseAbs().maxCoeff() < 1e-7);

  // away from a crossing there is no form to compute
  REQUIRE_THROWS_AS(crossing_form_lagrangian(graph_path(rot), diagonal_lagrangian(1), 0.5),
                    invalid_input_error);
}

TEST_CASE("graph paths against the diagonal reproduce the matrix index") {
  // rotations and loops with known values
  for (int n = 1; n <= 2; ++n) {
    const PathSpec rot = path_from_generator(Mat(M_PI * Mat::Identity(2 * n, 2 * n)));
    REQUIRE(rs_graph(rot) == HalfInt::from_int(n));
    REQUIRE(robbin_salamon(rot) == HalfInt::from_int(n));
  }
  REQUIRE(rs_graph(loop_phi(1, 1)) == HalfInt::from_int(2));
  REQUIRE(rs_graph(loop_phi(2, 2)) == HalfInt::from_int(4));

  // hyperbolic crossing with balanced signature: index zero
  Vec sd(2);
  sd << 1.0, -1.0;
  REQUIRE(rs_graph(path_from_generator(Mat(sd.asDiagonal()))) == HalfInt(0));

  // random paths: exact agreement with the extension-based index
  std::mt19937_64 rng(42421u);
  int done = 0, attempts = 0;
  while (done < 10 && attempts < 300) {
    ++attempts;
    const int n = 1 + static_cast<int>(rng() % 2);
    const PathSpec p = random_generator_path(rng, n, 1, 3, 0.9);
    try {
      const HalfInt lagr = rs_graph(p);
      const HalfInt ext = robbin_salamon(p);
      CAPTURE(attempts, n);
      REQUIRE(lagr == ext);
      ++done;
    } catch (const regularity_error&) {
      continue;  // degenerate crossing: resample
    }
  }
  REQUIRE(done == 10);
}

TEST_CASE("vertical-image index: shears and the non-coincidence pair") {
  // the lower shear fixes the vertical subspace pointwise: index 0 by the
  // constant-stratum rule
  const PathSpec lower = lower_shear_path();
  const auto rep0 = rs_prime_report(lower);
  REQUIRE(rep0.index == HalfInt(0));
  REQUIRE(rep0.constant_stratum);

  // but the matrix index of the same path is 1/2: the two indices differ
  REQUIRE(robbin_salamon(lower) == HalfInt(1));

  // and the matrix index is natural: conjugating by the quarter turn gives
  // the upper shear with the same index 1/2
  const PathSpec upper_conj = path_conjugate_const(lower, quarter_turn());
  REQUIRE(robbin_salamon(upper_conj) == HalfInt(1));

  // the conjugated path is an upper shear, whose vertical-image index is 1/2:
  // the second index is not invariant under this conjugation
  REQUIRE(rs_prime(upper_conj) == HalfInt(1));

  // upper-shear closed form: half the endpoint signature difference
  {
    Mat b0(1, 1), b1(1, 1);
    b0 << 0.0;
    b1 << -1.0;
    REQUIRE(rs_prime(shear_linear(b0, b1)) == HalfInt(1));  // ((1,-t),(0,1))
    b1 << 1.0;
    REQUIRE(rs_prime(shear_linear(b0, b1)) == HalfInt(-1));
  }

  // random endpoints, including a singular start
  std::mt19937_64 rng(5150u);
  int done = 0, attempts = 0;
  while (done < 8 && attempts < 200) {
    ++attempts;
    const int nb = 1 + static_cast<int>(rng() % 2);
    Mat B0 = (attempts % 3 == 0) ? Mat(Mat::Zero(nb, nb)) : random_symmetric(rng, nb, 1.0);
    Mat B1 = random_symmetric(rng, nb, 1.0);
    try {
      const HalfInt got = rs_prime(shear_linear(B0, B1));
      const HalfInt want(signature_of(B0) - signature_of(B1));
      CAPTURE(attempts, nb);
      REQUIRE(got == want);
      ++done;
    } catch (const regularity_error&) {
      continue;
    }
  }
  REQUIRE(done == 8);

  // scan-based methods refuse the persistent intersection of the lower shear
  // in the graph picture, matching the matrix-side crossing scan
  REQUIRE_THROWS_AS(rs_graph(lower), regularity_error);
  REQUIRE_THROWS_AS(rs_crossings_report(lower), regularity_error);
}

TEST_CASE("naturality, gauge freedom, zero, catenation, product") {
  std::mt19937_64 rng(777u);

  // naturality in the standard ambient: transform path and reference by the
  // same symplectic map
  {
    Mat B0(2, 2), B1(2, 2);
    B0 << -1.0, 0.0, 0.0, -1.0;
    B1 << 2.0, 0.3, 0.3, 1.0;
    const PathSpec shear = shear_linear(B0, B1);
    const Lagrangian L0 = vertical_lagrangian(2);
    const LagrangianPath lam = image_path(shear, L0);
    const HalfInt base = rs_index_lagrangian(lam, L0);
    for (int trial = 0; trial < 3; ++trial) {
      const Mat g = random_symplectic(rng, 2, 2, 0.5);
      const LagrangianPath moved = lagrangian_transform(lam, g);
      const Lagrangian ref{Mat(g * L0.frame)};
      REQUIRE(rs_index_lagrangian(moved, ref) == base);
    }
  }

  // naturality in the doubled space, with a block transform
  {
    const PathSpec rot = path_from_generator(Mat(M_PI * Mat::Identity(2, 2)));
    const LagrangianPath gp = graph_path(rot);
    const Mat h = random_symplectic(rng, 1, 2, 0.5);
    Mat g = Mat::Zero(4, 4);
    g.topLeftCorner(2, 2) = h;
    g.bottomRightCorner(2, 2) = h;
    const Lagrangian ref{Mat(g * diagonal_lagrangian(1).frame)};
    REQUIRE(rs_index_lagrangian(lagrangian_transform(gp, g), ref) == HalfInt::from_int(1));
  }

  // form naturality on one localization instance: Gram matrices are
  // congruent under the basis correspondence induced by the transform
  {
    auto stag = symmetric_graph_family(2, [](double t) {
      Vec d(2);
      d << t - 0.3, t - 0.7;
      return Mat(d.asDiagonal());
    });
    const Lagrangian href = horizontal_lagrangian(2);
    auto [V, gamma] = crossing_form_lagrangian(stag, href, 0.3);
    const Mat g = random_symplectic(rng, 2, 2, 0.5);
    auto moved = lagrangian_transform(stag, g);
    const Lagrangian mref{Mat(g * href.frame)};
    auto [Vm, gamma_m] = crossing_form_lagrangian(moved, mref, 0.3);
    // solve Vm * T = g * V, then gamma = T^T gamma_m T
    const Mat T = Vm.colPivHouseholderQr().solve(g * V);
    REQUIRE((T.transpose() * gamma_m * T - gamma).cwiseAbs().maxCoeff() < 1e-5);
  }

  // gauge freedom: a time-dependent change of frame does not move the index
  {
    Mat b0(1, 1), b1(1, 1);
    b0 << 0.0;
    b1 << -1.0;
    const PathSpec upper = shear_linear(b0, b1);
    const Lagrangian L0 = vertical_lagrangian(1);
    auto gauged = lagrangian_path_from_frames(
        standard_ambient(1), 0.0, 1.0,
        [upper, L0](double t) { return Mat(upper.value(t) * L0.frame * (1.0 + 2.0 * t)); },
        upper.joint_times());
    REQUIRE(rs_index_lagrangian(gauged, L0) == HalfInt(1));
  }

  // zero property: constant paths
  REQUIRE(rs_graph(path_constant(Mat::Identity(4, 4))) == HalfInt(0));
  {
    Mat turn = Mat::Zero(2, 2);
    turn << 0.0, -1.0, 1.0, 0.0;  // maps vertical to horizontal: no crossing
    const auto rep = rs_prime_report(path_constant(turn));
    REQUIRE(rep.index == HalfInt(0));
    REQUIRE(rep.crossings.empty());
  }

  // catenation: the loop splits into two halves carrying one each
  {
    const PathSpec loop = loop_phi(1, 1);
    auto [left, right] = path_split_at(loop, 0.4);
    REQUIRE(rs_graph(loop) == HalfInt::from_int(2));
    REQUIRE(rs_graph(left) + rs_graph(right) == HalfInt::from_int(2));
  }

  // product: interleaved direct sums add their indices
  {
    const PathSpec rot = path_from_generator(Mat(M_PI * Mat::Identity(2, 2)));
    const PathSpec prod = path_direct_sum(rot, loop_phi(1, 1));
    REQUIRE(rs_graph(prod) == HalfInt::from_int(3));
  }
}
