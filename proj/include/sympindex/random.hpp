#pragma once

#include <random>

#include "sympindex/path.hpp"

namespace sympindex {

inline Mat random_symmetric(std::mt19937_64& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat S(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) S(i, j) = g(rng);
  S = 0.5 * scale * (S + S.transpose()).eval();
  return S;
}

// Random symmetric matrix with spectral radius strictly below radius_cap,
// optionally with rank_drop eigenvalues forced to zero.
inline Mat random_symmetric_bounded(std::mt19937_64& rng, int dim, double radius_cap,
                                    int rank_drop = 0) {
  Mat S = random_symmetric(rng, dim);
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  Vec ev = es.eigenvalues();
  if (rank_drop > 0) {
    // zero out the eigenvalues of smallest magnitude
    std::vector<int> idx(dim);
    for (int i = 0; i < dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
    for (int k = 0; k < rank_drop && k < dim; ++k) ev(idx[static_cast<size_t>(k)]) = 0.0;
  }
  const double radius = ev.cwiseAbs().maxCoeff();
  if (radius > 0.0) {
    std::uniform_real_distribution<double> u(0.2, 0.95);
    ev *= u(rng) * radius_cap / radius;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Random symplectic matrix as a short product of exponentials exp(J0 S).
inline Mat random_symplectic(std::mt19937_64& rng, int n, int factors = 3, double scale = 0.5) {
  Mat A = Mat::Identity(2 * n, 2 * n);
  for (int k = 0; k < factors; ++k) {
    const Mat S = random_symmetric(rng, 2 * n, scale);
    A = (Mat(J0(n) * S)).exp() * A;
  }
  return A;
}

// Random piecewise-exponential path starting at Id over [0, 1].
inline PathSpec random_generator_path(std::mt19937_64& rng, int n, int min_segments = 1,
                                      int max_segments = 4, double scale = 0.8) {
  std::uniform_int_distribution<int> nseg(min_segments, max_segments);
  const int k = nseg(rng);
  std::vector<PathSpec> parts;
  Mat start = Mat::Identity(2 * n, 2 * n);
  for (int i = 0; i < k; ++i) {
    const double t0 = static_cast<double>(i) / k;
    const double t1 = static_cast<double>(i + 1) / k;
    const Mat S = random_symmetric(rng, 2 * n, scale);
    parts.push_back(path_from_generator(S, 1.0, t0, t1, start));
    start = parts.back().end_value();
  }
  return path_catenate(parts);
}

}  // namespace sympindex
