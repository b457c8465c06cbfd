#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "sympindex/tolerances.hpp"

namespace sympindex {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Basis convention used throughout: R^{2n} coordinates are ordered
// (e_1..e_n, f_1..f_n), i.e. all "position" coordinates first, then all
// "momentum" coordinates.  z = x + iy in C^n corresponds to (x; y).

// J0 = ((0, -Id), (Id, 0)): multiplication by i under the identification above.
inline Mat J0(int n) {
  Mat j = Mat::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = -Mat::Identity(n, n);
  j.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return j;
}

// Matrix of the standard symplectic form: Omega0(u, v) = u^T * Omega0mat(n) * v.
// Omega0mat = ((0, Id), (-Id, 0)) = -J0 = J0^T.
inline Mat Omega0mat(int n) {
  Mat w = Mat::Zero(2 * n, 2 * n);
  w.topRightCorner(n, n) = Mat::Identity(n, n);
  w.bottomLeftCorner(n, n) = -Mat::Identity(n, n);
  return w;
}

inline double omega0(const Vec& u, const Vec& v) {
  const int n = static_cast<int>(u.size()) / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

struct StandardStructures {
  int n;
  Mat J;      // complex structure
  Mat Omega;  // symplectic form matrix
  explicit StandardStructures(int half_dim)
      : n(half_dim), J(J0(half_dim)), Omega(Omega0mat(half_dim)) {}
};

inline double symplectic_residual(const Mat& A) {
  const int n = static_cast<int>(A.rows()) / 2;
  const Mat j = J0(n);
  return (A.transpose() * j * A - j).cwiseAbs().maxCoeff();
}

inline bool is_symplectic(const Mat& A, double tol = Tolerances{}.symplectic) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0) return false;
  return symplectic_residual(A) <= tol;
}

inline void require_symplectic(const Mat& A, double tol = Tolerances{}.symplectic,
                               const char* who = "matrix") {
  if (A.rows() != A.cols() || A.rows() % 2 != 0 || A.rows() == 0)
    throw invalid_input_error(std::string(who) + ": expected a square 2n x 2n matrix");
  const double r = symplectic_residual(A);
  if (!(r <= tol)) {
    std::ostringstream os;
    os << who << ": symplectic residual " << r << " exceeds tolerance " << tol;
    throw invalid_input_error(os.str());
  }
}

// Validated element of Sp(2n).  Thin value type: algorithms read `.m` freely.
struct SymplecticMatrix {
  Mat m;
  int n = 0;

  SymplecticMatrix() = default;
  explicit SymplecticMatrix(Mat A, double tol = Tolerances{}.symplectic) : m(std::move(A)) {
    require_symplectic(m, tol, "SymplecticMatrix");
    n = static_cast<int>(m.rows()) / 2;
  }
  static SymplecticMatrix unchecked(Mat A) {
    SymplecticMatrix s;
    s.n = static_cast<int>(A.rows()) / 2;
    s.m = std::move(A);
    return s;
  }
  static SymplecticMatrix identity(int n) { return unchecked(Mat::Identity(2 * n, 2 * n)); }
};

// Direct sum in the (e, f)-interleaved layout: the result acts as A on the
// first na pairs and as B on the remaining nb pairs.  With na = nb = 1 the
// rows read (A1 0 A2 0; 0 B1 0 B2; A3 0 A4 0; 0 B3 0 B4).
inline Mat direct_sum(const Mat& A, const Mat& B) {
  const int na = static_cast<int>(A.rows()) / 2;
  const int nb = static_cast<int>(B.rows()) / 2;
  const int n = na + nb;
  Mat r = Mat::Zero(2 * n, 2 * n);
  r.block(0, 0, na, na) = A.block(0, 0, na, na);
  r.block(0, n, na, na) = A.block(0, na, na, na);
  r.block(n, 0, na, na) = A.block(na, 0, na, na);
  r.block(n, n, na, na) = A.block(na, na, na, na);
  r.block(na, na, nb, nb) = B.block(0, 0, nb, nb);
  r.block(na, n + na, nb, nb) = B.block(0, nb, nb, nb);
  r.block(n + na, na, nb, nb) = B.block(nb, 0, nb, nb);
  r.block(n + na, n + na, nb, nb) = B.block(nb, nb, nb, nb);
  return r;
}

inline Mat direct_sum(const std::vector<Mat>& blocks) {
  if (blocks.empty()) throw invalid_input_error("direct_sum: no blocks");
  Mat acc = blocks.front();
  for (size_t i = 1; i < blocks.size(); ++i) acc = direct_sum(acc, blocks[i]);
  return acc;
}

// Permutation P with  A (+) B = P * blkdiag(A, B) * P^T,  where blkdiag uses
// the naive stacked layout (e^A f^A e^B f^B) and (+) the interleaved one
// (e^A e^B f^A f^B).  Returned as a dense matrix for easy composition.
inline Mat interleave_permutation(const std::vector<int>& half_dims) {
  const int n = std::accumulate(half_dims.begin(), half_dims.end(), 0);
  Mat P = Mat::Zero(2 * n, 2 * n);
  int stacked = 0;  // column index in the blkdiag layout
  int e_out = 0;    // next e-slot in the interleaved layout
  for (int nb : half_dims) {
    for (int i = 0; i < nb; ++i) P(e_out + i, stacked + i) = 1.0;            // e block
    for (int i = 0; i < nb; ++i) P(n + e_out + i, stacked + nb + i) = 1.0;   // f block
    stacked += 2 * nb;
    e_out += nb;
  }
  return P;
}

// diag(d1..dn, g1..gn) convenience: e_k -> d_k e_k, f_k -> g_k f_k.
inline Mat ef_diagonal(const Vec& d, const Vec& g) {
  const int n = static_cast<int>(d.size());
  Vec full(2 * n);
  full.head(n) = d;
  full.tail(n) = g;
  return full.asDiagonal();
}

// The two reference endpoints of index theory in this convention.
inline Mat w_plus(int n) { return -Mat::Identity(2 * n, 2 * n); }

inline Mat w_minus(int n) {
  Vec d = -Vec::Ones(n), g = -Vec::Ones(n);
  d(0) = 2.0;
  g(0) = 0.5;
  return ef_diagonal(d, g);
}

// Exact half-integers, stored as twice the value.
struct HalfInt {
  long long twice = 0;

  HalfInt() = default;
  explicit HalfInt(long long twice_value) : twice(twice_value) {}
  static HalfInt from_int(long long k) { return HalfInt(2 * k); }

  double value() const { return 0.5 * static_cast<double>(twice); }
  bool is_integer() const { return twice % 2 == 0; }
  long long num() const { return is_integer() ? twice / 2 : twice; }
  long long den() const { return is_integer() ? 1 : 2; }

  HalfInt operator+(HalfInt o) const { return HalfInt(twice + o.twice); }
  HalfInt operator-(HalfInt o) const { return HalfInt(twice - o.twice); }
  HalfInt operator-() const { return HalfInt(-twice); }
  bool operator==(const HalfInt&) const = default;

  std::string str() const {
    std::ostringstream os;
    if (is_integer()) os << num();
    else os << twice << "/2";
    return os.str();
  }
};

// Snap a real number to the nearest half-integer; loud failure beyond round_tol.
inline HalfInt round_to_half_integer(double x, double round_tol = Tolerances{}.round) {
  const double twice = 2.0 * x;
  const double snapped = std::round(twice);
  if (std::abs(twice - snapped) > 2.0 * round_tol) {
    std::ostringstream os;
    os << "value " << x << " is not within " << round_tol << " of a half-integer";
    throw tolerance_error(os.str());
  }
  return HalfInt(static_cast<long long>(snapped));
}

inline long long round_to_integer(double x, double round_tol = Tolerances{}.round) {
  const double snapped = std::round(x);
  if (std::abs(x - snapped) > round_tol) {
    std::ostringstream os;
    os << "value " << x << " is not within " << round_tol << " of an integer";
    throw tolerance_error(os.str());
  }
  return static_cast<long long>(snapped);
}

}  // namespace sympindex
