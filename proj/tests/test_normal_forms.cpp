// Algebraic identity between the shear parameters of unipotent normal-form
// blocks and the signatures of the iterated kernel forms: for an aggregate of
// blocks with eigenvalue lambda, the sum of the block parameters d_j equals
// lambda times the total signature of the forms Qhat_k at lambda.  This is
// checked exactly (integer equality) on every admissible single block and on
// random interleaved aggregates, with and without a symplectic change of
// basis, and with spectral padding away from +-1.

#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "sympindex/core.hpp"
#include "sympindex/forms.hpp"
#include "sympindex/fixtures.hpp"
#include "sympindex/index.hpp"
#include "sympindex/random.hpp"

using namespace sympindex;

namespace {

struct BlockChoice {
  double lambda;
  int r;
  int d;
};

// Admissible parameter triples: lambda in {+1,-1}, 1 <= r <= 4, d in
// {-1,0,+1} with d = 0 allowed only when r is odd.
std::vector<BlockChoice> admissible_blocks() {
  std::vector<BlockChoice> out;
  for (double lambda : {1.0, -1.0})
    for (int r = 1; r <= 4; ++r)
      for (int d : {-1, 0, 1}) {
        if (d == 0 && r % 2 == 0) continue;
        out.push_back({lambda, r, d});
      }
  return out;
}

Mat rotation2(double theta) {
  Mat r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

}  // namespace

TEST_CASE("every admissible block reproduces its shear parameter") {
  for (const auto& c : admissible_blocks()) {
    CAPTURE(c.lambda, c.r, c.d);
    const Mat A = normal_form_block(c.lambda, c.r, c.d);
    REQUIRE(is_symplectic(A, 1e-9));
    REQUIRE(qhat_signature_sum(A, c.lambda) == c.d);
    // The forms at the opposite eigenvalue see nothing.
    REQUIRE(qhat_signature_sum(A, -c.lambda) == 0);
  }
}

TEST_CASE("hand-checked anchors for the sign orientation") {
  // ((1, d), (0, 1)): single plane, eigenvalue +1, parameter d.
  for (int d : {-1, 1}) {
    Mat A = Mat::Identity(2, 2);
    A(0, 1) = d;
    REQUIRE(qhat_signature_sum(A, 1.0) == d);
  }
  // ((-1, -d), (0, -1)): single plane, eigenvalue -1, parameter d.
  for (int d : {-1, 1}) {
    Mat A = -Mat::Identity(2, 2);
    A(0, 1) = -d;
    REQUIRE(qhat_signature_sum(A, -1.0) == d);
  }
}

TEST_CASE("random aggregates: parameter sums split by eigenvalue") {
  std::mt19937_64 rng(20240811u);
  const auto menu = admissible_blocks();
  std::uniform_int_distribution<size_t> pick(0, menu.size() - 1);
  std::uniform_int_distribution<int> count(1, 4);

  for (int trial = 0; trial < 60; ++trial) {
    std::vector<Mat> blocks;
    int sum_plus = 0, sum_minus = 0, total_half_dim = 0;
    const int k = count(rng);
    for (int i = 0; i < k && total_half_dim < 6; ++i) {
      const auto& c = menu[pick(rng)];
      blocks.push_back(normal_form_block(c.lambda, c.r, c.d));
      (c.lambda > 0 ? sum_plus : sum_minus) += c.d;
      total_half_dim += c.r;
    }
    const Mat agg = direct_sum(blocks);
    CAPTURE(trial, blocks.size(), total_half_dim);
    REQUIRE(is_symplectic(agg, 1e-9));
    REQUIRE(qhat_signature_sum(agg, 1.0) == sum_plus);
    REQUIRE(qhat_signature_sum(agg, -1.0) == sum_minus);
  }
}

TEST_CASE("the identity survives a symplectic change of basis") {
  std::mt19937_64 rng(911u);
  const auto menu = admissible_blocks();
  std::uniform_int_distribution<size_t> pick(0, menu.size() - 1);
  std::uniform_int_distribution<int> count(1, 3);

  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Mat> blocks;
    int sum_plus = 0, sum_minus = 0, total_half_dim = 0;
    const int k = count(rng);
    for (int i = 0; i < k && total_half_dim < 5; ++i) {
      const auto& c = menu[pick(rng)];
      blocks.push_back(normal_form_block(c.lambda, c.r, c.d));
      (c.lambda > 0 ? sum_plus : sum_minus) += c.d;
      total_half_dim += c.r;
    }
    const Mat agg = direct_sum(blocks);
    const Mat P = random_symplectic(rng, total_half_dim, 2, 0.35);
    const Mat conj = P * agg * P.inverse();
    CAPTURE(trial, total_half_dim);
    REQUIRE(qhat_signature_sum(conj, 1.0) == sum_plus);
    REQUIRE(qhat_signature_sum(conj, -1.0) == sum_minus);
  }
}

TEST_CASE("spectral padding away from +-1 does not disturb the sums") {
  std::mt19937_64 rng(7u);
  const auto menu = admissible_blocks();
  std::uniform_int_distribution<size_t> pick(0, menu.size() - 1);

  Vec d2(1), g2(1);
  d2 << 2.0;
  g2 << 0.5;
  const std::vector<Mat> padding = {rotation2(0.7), ef_diagonal(d2, g2)};

  for (int trial = 0; trial < 20; ++trial) {
    const auto& c = menu[pick(rng)];
    const Mat core = normal_form_block(c.lambda, c.r, c.d);
    const Mat agg = direct_sum({core, padding[trial % padding.size()]});
    CAPTURE(trial, c.lambda, c.r, c.d);
    REQUIRE(qhat_signature_sum(agg, c.lambda) == c.d);
    REQUIRE(qhat_signature_sum(agg, -c.lambda) == 0);
  }
}

// The bidiagonal deformation family interpolates, inside the stratum of fixed
// eigenvalue-one kernel dimension, between a unipotent normal-form block and a
// plane shear padded with hyperbolic planes.  Its index must vanish (constant
// kernel dimension), and the catenation that first deforms, then relaxes the
// shear and contracts the hyperbolic part to the identity must carry the index
// +-1/2 Sign(d) predicted for the block itself.
TEST_CASE("unipotent deformation family: endpoints, stratum, and index") {
  for (int r = 1; r <= 3; ++r) {
    for (int d : {-1, 0, 1}) {
      if (d == 0 && r % 2 == 0) continue;
      CAPTURE(r, d);

      const Mat at0 = unipotent_deformation_value(0.0, r, d);
      REQUIRE((at0 - normal_form_block(1.0, r, d)).cwiseAbs().maxCoeff() == 0.0);

      Mat shear(2, 2);
      shear << 1.0, d, 0.0, 1.0;
      Mat at1_expect = shear;
      if (r > 1) {
        const Vec lo = -Vec::Ones(r - 1), hi = Vec::Ones(r - 1);
        at1_expect = direct_sum(
            shear, ef_diagonal(lo.array().exp().matrix(), hi.array().exp().matrix()));
      }
      const Mat at1 = unipotent_deformation_value(1.0, r, d);
      REQUIRE((at1 - at1_expect).cwiseAbs().maxCoeff() < 1e-12);

      const int expected_kernel = (d == 0) ? 2 : 1;
      for (int i = 0; i <= 8; ++i) {
        const double t = i / 8.0;
        const Mat A = unipotent_deformation_value(t, r, d);
        REQUIRE(is_symplectic(A, 1e-10));
        const Mat gap = A - Mat::Identity(2 * r, 2 * r);
        Eigen::JacobiSVD<Mat> svd(gap);
        int null_dim = 0;
        const double floor = 1e-9 * std::max(1.0, gap.cwiseAbs().maxCoeff());
        for (int k = 0; k < svd.singularValues().size(); ++k)
          if (svd.singularValues()(k) <= floor) ++null_dim;
        CAPTURE(t);
        REQUIRE(null_dim == expected_kernel);
      }

      REQUIRE(robbin_salamon(unipotent_deformation_path(r, d)) == HalfInt(0));
    }
  }
}

TEST_CASE("deforming a block and removing the shear recovers half its sign") {
  for (int r = 1; r <= 3; ++r) {
    for (int d : {-1, 0, 1}) {
      if (d == 0 && r % 2 == 0) continue;
      CAPTURE(r, d);
      const PathSpec removal = unipotent_removal_path(r, d);
      REQUIRE(robbin_salamon(removal) == HalfInt(d));
    }
  }
}
