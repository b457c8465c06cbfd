#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "sympindex/rho.hpp"

using namespace sympindex;

namespace {
Mat rotation2(double phi) {
  Mat r(2, 2);
  r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return r;
}
Mat hyperbolic2(double a) {
  Mat h(2, 2);
  h << a, 0, 0, 1.0 / a;
  return h;
}

// random unitary embedded into Sp(2n) via QR of a complex Gaussian matrix
Mat random_unitary_real(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat Z(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) Z(i, j) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(Z);
  CMat Q = qr.householderQ() * CMat::Identity(n, n);
  // normalize column phases so R has positive diagonal (Haar-ish; irrelevant here)
  return real_representation(Q);
}

Mat random_symplectic(int n, std::mt19937_64& rng, int factors = 2, double scale = 0.8) {
  std::normal_distribution<double> gauss(0.0, scale);
  Mat A = Mat::Identity(2 * n, 2 * n);
  for (int f = 0; f < factors; ++f) {
    Mat S(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = i; j < 2 * n; ++j) S(i, j) = S(j, i) = gauss(rng);
    A = A * Mat(Mat(J0(n) * S).exp());
  }
  return A;
}

void check_close(Complex a, Complex b, double tol = 1e-8) {
  REQUIRE(std::abs(a - b) < tol);
}
}  // namespace

TEST_CASE("circle maps at the identity and simple points") {
  const Mat I2 = Mat::Identity(2, 2);
  check_close(rho_spectral(I2), Complex(1, 0));
  check_close(rho_polar(I2), Complex(1, 0));
  check_close(rho_chat(I2), Complex(1, 0));

  // planar rotation: all maps equal e^{i phi}
  const double phi = 0.7;
  const Complex expect = std::polar(1.0, phi);
  check_close(rho_spectral(rotation2(phi)), expect);
  check_close(rho_polar(rotation2(phi)), expect);
  check_close(rho_chat(rotation2(phi)), expect);

  // -Id: (-1)^n
  check_close(rho_spectral(Mat(-Mat::Identity(2, 2))), Complex(-1, 0));
  check_close(rho_spectral(Mat(-Mat::Identity(4, 4))), Complex(1, 0));
  check_close(rho_chat(Mat(-Mat::Identity(4, 4))), Complex(1, 0));
  check_close(rho_polar(Mat(-Mat::Identity(2, 2))), Complex(-1, 0));

  // hyperbolic: trivial spectral value; J0-linear part has determinant 5/4
  check_close(rho_spectral(hyperbolic2(2.0)), Complex(1, 0));
  check_close(rho_chat(hyperbolic2(2.0)), Complex(1, 0));
  REQUIRE(std::abs(det_complex(clinear_part(hyperbolic2(2.0))) - Complex(1.25, 0)) < 1e-12);

  // negative hyperbolic pair: m^- = 2, no circle spectrum
  check_close(rho_spectral(Mat(-hyperbolic2(2.0))), Complex(-1, 0));
  check_close(rho_chat(Mat(-hyperbolic2(2.0))), Complex(-1, 0));
}

TEST_CASE("circle maps at the reference endpoints") {
  for (int n = 1; n <= 3; ++n) {
    const Complex expect((n % 2 == 0) ? 1.0 : -1.0, 0.0);
    check_close(rho_spectral(w_plus(n)), expect);
    check_close(rho_polar(w_plus(n)), expect);
    check_close(rho_chat(w_plus(n)), expect);
  }
  // W^-(2) = diag(2,-1,1/2,-1): m^- = 2 so rho = -1; the J0-linear part is
  // diag(5/4,-1,5/4,-1) with complex determinant -5/4.
  check_close(rho_spectral(w_minus(2)), Complex(-1, 0));
  check_close(rho_chat(w_minus(2)), Complex(-1, 0));
  check_close(rho_polar(w_minus(2)), Complex(-1, 0));
  check_close(rho_spectral(w_minus(1)), Complex(1, 0));
  check_close(rho_spectral(w_minus(3)), Complex(1, 0));
}

TEST_CASE("agreement with the complex determinant on the unitary subgroup") {
  std::mt19937_64 rng(20240817u);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const Mat U = random_unitary_real(n, rng);
    REQUIRE(is_symplectic(U, 1e-9));
    const Complex dc = det_complex(U);
    const Complex ref = dc / std::abs(dc);
    check_close(rho_polar(U), ref, 1e-8);
    check_close(rho_chat(U), ref, 1e-8);
    check_close(rho_spectral(U), ref, 1e-7);
  }
}

TEST_CASE("spectral map respects conjugation and direct sums") {
  std::mt19937_64 rng(77u);
  // conjugation invariance
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const Mat A = random_symplectic(n, rng);
    const Mat P = random_symplectic(n, rng);
    const Mat B = P * A * P.inverse();
    check_close(rho_spectral(B), rho_spectral(A), 1e-7);
  }
  // multiplicativity under direct sum
  for (int trial = 0; trial < 25; ++trial) {
    const Mat A = random_symplectic(1, rng);
    const Mat B = random_symplectic(2, rng);
    check_close(rho_spectral(direct_sum(A, B)), rho_spectral(A) * rho_spectral(B), 1e-7);
  }
}

TEST_CASE("spectral map is +-1 off the circle") {
  // positive hyperbolic / off-circle quadruple: value +1; negative pair: -1
  Vec d(2), g(2);
  d << 2, 3;
  g << 0.5, 1.0 / 3.0;
  check_close(rho_spectral(ef_diagonal(d, g)), Complex(1, 0));

  const Mat X = 1.3 * rotation2(0.6);
  Mat Q = Mat::Zero(4, 4);
  Q.topLeftCorner(2, 2) = X;
  Q.bottomRightCorner(2, 2) = X.inverse().transpose();
  check_close(rho_spectral(Q), Complex(1, 0));
  check_close(rho_chat(Q) * rho_chat(Q), Complex(1, 0), 1e-9);  // real values square to 1

  check_close(rho_spectral(Mat(-ef_diagonal(d, g))), Complex(1, 0));  // m^- = 4
}

TEST_CASE("normalized eigenvalue contributions of mixed spectra") {
  // rotation (+) hyperbolic: rho picks up exactly the rotation angle
  const double phi = 1.234;
  const Mat A = direct_sum(rotation2(phi), hyperbolic2(3.0));
  const Complex expect = std::polar(1.0, phi);
  check_close(rho_spectral(A), expect);
  check_close(rho_chat(A), expect, 1e-9);
  check_close(rho_polar(A), expect, 1e-9);

  // rotation (+) negative pair
  const Mat B = direct_sum(rotation2(phi), Mat(-hyperbolic2(3.0)));
  check_close(rho_spectral(B), -expect);
}

TEST_CASE("one-parameter family through the negative reference endpoint") {
  // psi(t) = exp(t pi J0 S) with S chosen so that psi(1) = W^-(n): the first
  // (e,f)-plane moves hyperbolically 1 -> diag(2,1/2), the others rotate to -1.
  // All three maps equal e^{i pi (n-1) t} along the way.
  for (int n : {2, 3}) {
    Mat S = Mat::Identity(2 * n, 2 * n);
    const double sigma = std::log(2.0) / M_PI;
    S(0, 0) = 0.0;
    S(n, n) = 0.0;
    S(0, n) = S(n, 0) = -sigma;
    for (double t : {0.25, 0.5, 0.8}) {
      const Mat psi = Mat(t * M_PI * J0(n) * S).exp();
      REQUIRE(is_symplectic(psi, 1e-9));
      const Complex expect = std::polar(1.0, M_PI * (n - 1) * t);
      check_close(rho_spectral(psi), expect, 1e-8);
      check_close(rho_polar(psi), expect, 1e-8);
      check_close(rho_chat(psi), expect, 1e-8);
    }
    // endpoint sanity: psi(1) = W^-(n)
    const Mat end = Mat(M_PI * J0(n) * S).exp();
    REQUIRE((end - w_minus(n)).cwiseAbs().maxCoeff() < 1e-9);
  }
}
