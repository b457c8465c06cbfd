#include <catch2/catch_amalgamated.hpp>

#include "sympindex/fixtures.hpp"
#include "sympindex/path.hpp"
#include "sympindex/random.hpp"

using namespace sympindex;

namespace {

double value_gap(const PathSpec& p, const PathSpec& q, int samples = 37) {
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = p.a + (p.b - p.a) * static_cast<double>(i) / samples;
    worst = std::max(worst, (p.value(t) - q.value(t)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("generator segments match closed forms") {
  // S = diag(1, 0): exp(t J0 S) = ((1,0),(t,1))
  Mat Sdown = Mat::Zero(2, 2);
  Sdown(0, 0) = 1.0;
  PathSpec down = path_from_generator(Sdown);
  Mat expect = Mat::Identity(2, 2);
  expect(1, 0) = 0.3;
  CHECK((down.value(0.3) - expect).cwiseAbs().maxCoeff() < 1e-14);

  // S = diag(0, 1): exp(t J0 S) = ((1,-t),(0,1))
  Mat Sup = Mat::Zero(2, 2);
  Sup(1, 1) = 1.0;
  PathSpec up = path_from_generator(Sup);
  expect = Mat::Identity(2, 2);
  expect(0, 1) = -0.7;
  CHECK((up.value(0.7) - expect).cwiseAbs().maxCoeff() < 1e-14);

  // derivative and generator recovery, also on a full-rank generator; the
  // rate is the total exponent multiple over the segment, so the
  // instantaneous generator is (rate / length) S
  std::mt19937_64 rng(71);
  const Mat S = random_symmetric(rng, 4);
  PathSpec p = path_from_generator(S, 0.8, 0.0, 2.0);
  for (double t : {0.0, 0.5, 1.3, 2.0}) {
    const Mat lhs = p.derivative(t);
    const Mat rhs = 0.4 * J0(2) * S * p.value(t);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((generator_s(p, t) - 0.4 * S).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("left-exponential shear paths are exact") {
  std::mt19937_64 rng(72);
  const Mat B0 = random_symmetric(rng, 3);
  const Mat B1 = random_symmetric(rng, 3);
  PathSpec p = shear_linear(B0, B1);
  for (double t : {0.0, 0.25, 0.6, 1.0}) {
    Mat expect = Mat::Identity(6, 6);
    expect.topRightCorner(3, 3) = B0 + t * (B1 - B0);
    CHECK((p.value(t) - expect).cwiseAbs().maxCoeff() < 1e-13);
    Mat dexpect = Mat::Zero(6, 6);
    dexpect.topRightCorner(3, 3) = B1 - B0;
    CHECK((p.derivative(t) - dexpect).cwiseAbs().maxCoeff() < 1e-12);
  }

  // generator form: exp(t J0 blkdiag(0, B)) = ((Id, -tB), (0, Id))
  PathSpec g = shear_generator(B0);
  Mat expect = Mat::Identity(6, 6);
  expect.topRightCorner(3, 3) = -0.4 * B0;
  CHECK((g.value(0.4) - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("splitting and joining preserve values") {
  std::mt19937_64 rng(73);
  PathSpec p = random_generator_path(rng, 2, 2, 3);
  for (double c : {0.21, 0.5, 0.83}) {
    auto [left, right] = path_split_at(p, c);
    CHECK(left.b == Catch::Approx(c).margin(1e-14));
    CHECK((left.value(c) - p.value(c)).cwiseAbs().maxCoeff() < 1e-10);
    PathSpec glued = path_catenate(left, right);
    CHECK(value_gap(glued, p) < 1e-9);
  }
}

TEST_CASE("reversal, inverse and transpose act pointwise") {
  std::mt19937_64 rng(74);
  PathSpec p = random_generator_path(rng, 2, 2, 3);
  PathSpec rev = path_reverse(p);
  PathSpec inv = path_pointwise_inverse(p);
  PathSpec tra = path_transpose(p);
  for (int i = 0; i <= 23; ++i) {
    const double t = static_cast<double>(i) / 23;
    CHECK((rev.value(t) - p.value(1.0 - t)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((inv.value(t) - p.value(t).inverse()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((tra.value(t) - p.value(t).transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
  // reversal flips the derivative sign
  CHECK((rev.derivative(0.4) + p.derivative(0.6)).cwiseAbs().maxCoeff() < 1e-9);
  // double application is the identity operation
  CHECK(value_gap(path_reverse(rev), p) < 1e-12);
  CHECK(value_gap(path_pointwise_inverse(inv), p) < 1e-9);
  CHECK(value_gap(path_transpose(tra), p) < 1e-12);
}

TEST_CASE("reparameterization relabels without changing the trace") {
  std::mt19937_64 rng(75);
  PathSpec p = random_generator_path(rng, 1, 2, 2);
  const std::vector<double> from{0.0, 0.3, 1.0};
  const std::vector<double> to{0.0, 0.7, 1.0};
  PathSpec q = path_reparameterize(p, from, to);
  // piecewise-linear time change phi with phi(0.3) = 0.7
  auto phi = [&](double t) {
    return (t <= 0.3) ? t * (0.7 / 0.3) : 0.7 + (t - 0.3) * (0.3 / 0.7);
  };
  for (double t : {0.0, 0.1, 0.3, 0.55, 0.9, 1.0})
    CHECK((q.value(phi(t)) - p.value(t)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((q.start_value() - p.start_value()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q.end_value() - p.end_value()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("sampled paths interpolate geodesically") {
  // nodes on a one-parameter subgroup reproduce it exactly in between
  std::mt19937_64 rng(76);
  const Mat S = random_symmetric(rng, 4, 0.6);
  PathSpec exact = path_from_generator(S);
  std::vector<double> times;
  std::vector<Mat> mats;
  for (int i = 0; i <= 8; ++i) {
    times.push_back(static_cast<double>(i) / 8);
    mats.push_back(exact.value(times.back()));
  }
  PathSpec interp = path_sampled(times, mats);
  CHECK(value_gap(interp, exact, 50) < 1e-10);

  // nodes must be symplectic
  std::vector<Mat> bad = mats;
  bad[3](0, 0) += 0.1;
  CHECK_THROWS_AS(path_sampled(times, bad), invalid_input_error);

  // transitions with spectrum on the closed negative axis are rejected
  std::vector<double> t2{0.0, 1.0};
  std::vector<Mat> m2{Mat::Identity(2, 2), -Mat::Identity(2, 2)};
  CHECK_THROWS_AS(path_sampled(t2, m2), invalid_input_error);
}

TEST_CASE("direct sums and pointwise products evaluate blockwise") {
  std::mt19937_64 rng(77);
  PathSpec p = random_generator_path(rng, 1, 1, 2);
  PathSpec q = random_generator_path(rng, 1, 1, 2);
  PathSpec ds = path_direct_sum(p, q);
  for (double t : {0.0, 0.4, 1.0}) {
    const Mat expect = direct_sum(p.value(t), q.value(t));
    CHECK((ds.value(t) - expect).cwiseAbs().maxCoeff() < 1e-12);
  }

  PathSpec prod = path_pointwise_product(p, q);
  for (int i = 0; i <= 256; i += 8) {
    const double t = static_cast<double>(i) / 256;
    CHECK((prod.value(t) - p.value(t) * q.value(t)).cwiseAbs().maxCoeff() < 1e-9);
  }

  // conjugation by a path
  PathSpec c = random_generator_path(rng, 1, 1, 1);
  PathSpec conj = path_conjugate(p, c);
  for (double t : {0.1, 0.7})
    CHECK((conj.value(t) - c.value(t) * p.value(t) * c.value(t).inverse())
              .cwiseAbs()
              .maxCoeff() < 1e-10);
}

TEST_CASE("joint derivatives honor side selection") {
  // two-segment path with a genuine corner at t = 0.5
  Mat X1 = Mat::Zero(2, 2);
  X1(0, 1) = 1.0;
  Mat Y = Mat::Zero(2, 2);
  Y(1, 0) = 1.0;
  PathSpec a = path_left_exp(X1, Mat::Identity(2, 2), 0.0, 0.5);
  PathSpec b = path_left_exp(Y, a.end_value(), 0.5, 1.0);
  PathSpec p = path_catenate(a, b);
  CHECK_THROWS_AS(p.derivative(0.5), joint_derivative_error);
  const Mat dl = p.derivative(0.5, Side::Left);
  const Mat dr = p.derivative(0.5, Side::Right);
  // each leg spans half a time unit, so d/dt carries a factor 1/0.5 = 2
  CHECK((dl - 2.0 * X1 * p.value(0.5)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((dr - 2.0 * Y * p.value(0.5)).cwiseAbs().maxCoeff() < 1e-12);

  // corner inside a direct-sum child: side selection must reach it
  PathSpec phi = loop_phi(2, 2);
  CHECK_THROWS_AS(phi.derivative(0.5), joint_derivative_error);
  const Mat pl = phi.derivative(0.5, Side::Left);
  const Mat pr = phi.derivative(0.5, Side::Right);
  // rotation block agrees from both sides, the bump block flips sign
  CHECK(std::abs(pl(0, 0) - pr(0, 0)) < 1e-9);
  CHECK(std::abs(pl(1, 1) - pr(1, 1)) > 1e-6);
  CHECK(std::abs(pl(1, 1) + pr(1, 1)) < 1e-9);
}

TEST_CASE("catenation rejects mismatched endpoints") {
  PathSpec p = path_constant(Mat::Identity(2, 2));
  Mat far = Mat::Identity(2, 2);
  far(0, 0) = 2.0;
  far(1, 1) = 0.5;
  CHECK_THROWS_AS(path_catenate(p, path_constant(far)), invalid_input_error);
}
