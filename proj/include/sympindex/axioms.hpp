#pragma once

// Randomized verification of the structural properties that characterize the
// indices computed by this library: invariance under reparameterization and
// conjugation, additivity under catenation and direct sums, vanishing on paths
// with constant eigenvalue-one kernel dimension, the half-signature value on
// symmetric-generator paths, loop shifts, determinant parity, inverse
// antisymmetry, and agreement between the two half-integer index evaluators.
//
// Every check is deterministic given (seed, trials).  Failures are recorded
// with a note and the offending path so a report consumer can reproduce them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sympindex/core.hpp"
#include "sympindex/fixtures.hpp"
#include "sympindex/index.hpp"
#include "sympindex/path.hpp"
#include "sympindex/random.hpp"
#include "sympindex/tolerances.hpp"

namespace sympindex {

struct AxiomCheck {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::vector<std::string> notes;
  std::vector<PathSpec> counterexamples;

  bool passed() const { return trials > 0 && failures == 0; }
};

struct AxiomSuiteReport {
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<AxiomCheck> checks;

  bool all_passed() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.passed()) return false;
    return true;
  }

  const AxiomCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

// Random piecewise-exponential path whose endpoint is uniformly invertible
// minus the identity (so the integer index is defined).
inline PathSpec random_settled_path(std::mt19937_64& rng, int n, int max_segments = 3,
                                    double scale = 0.8) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    PathSpec p = random_generator_path(rng, n, 1, max_segments, scale);
    Eigen::JacobiSVD<Mat> svd(p.end_value() - Mat::Identity(2 * n, 2 * n));
    if (svd.singularValues()(2 * n - 1) > 1e-3) return p;
  }
  throw construction_error("axioms: could not sample a settled endpoint");
}

// Random strictly increasing interior knots 0 < u_1 < ... < u_k < 1 with a
// minimum separation, as a full knot vector over [a, b].
inline std::vector<double> random_knots(std::mt19937_64& rng, int interior, double a, double b) {
  std::uniform_real_distribution<double> u(0.06, 0.94);
  std::vector<double> k;
  for (int attempt = 0; attempt < 400; ++attempt) {
    k.clear();
    for (int i = 0; i < interior; ++i) k.push_back(u(rng));
    std::sort(k.begin(), k.end());
    bool ok = true;
    for (size_t i = 0; i + 1 < k.size(); ++i)
      if (k[i + 1] - k[i] < 0.05) ok = false;
    if (ok) break;
  }
  std::vector<double> out;
  out.push_back(a);
  for (double t : k) out.push_back(a + (b - a) * t);
  out.push_back(b);
  return out;
}

// A one-plane path R(theta0 + t * dtheta) of rotations whose angle stays
// inside (0, 2 pi): no eigenvalue ever equals one.
inline PathSpec elliptic_offset_plane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u0(0.3, 1.2), du(-1.0, 1.5);
  const double theta0 = u0(rng);
  double dtheta = du(rng);
  if (theta0 + dtheta < 0.1) dtheta = 0.1 - theta0;
  if (theta0 + dtheta > 6.0) dtheta = 6.0 - theta0;
  Mat R0(2, 2);
  R0 << std::cos(theta0), -std::sin(theta0), std::sin(theta0), std::cos(theta0);
  return path_left_exp(dtheta * J0(1), R0);
}

// A one-plane hyperbolic path diag(m e^{ut}, (1/m) e^{-ut}) with m >= 2 and
// |u| small enough that the eigenvalues never reach one.
inline PathSpec hyperbolic_offset_plane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> um(2.0, 3.0), uu(-0.5, 0.5);
  const double m = um(rng), u = uu(rng);
  Vec d(1), g(1);
  d << m;
  g << 1.0 / m;
  Vec xd(1), xg(1);
  xd << u;
  xg << -u;
  return path_left_exp(ef_diagonal(xd, xg), ef_diagonal(d, g));
}

// A one-plane shear ((1, 0), (c(t), 1)) with c(t) affine and never zero: the
// eigenvalue-one kernel has dimension one for every t.
inline PathSpec pinned_shear_plane(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uc(0.3, 2.0);
  std::bernoulli_distribution flip(0.5);
  double c0 = uc(rng), c1 = uc(rng);
  if (flip(rng)) {
    c0 = -c0;
    c1 = -c1;
  }
  Mat N = Mat::Zero(2, 2);
  N(1, 0) = 1.0;
  Mat start = Mat::Identity(2, 2) + c0 * N;
  return path_left_exp((c1 - c0) * N, start);
}

// Paths whose eigenvalue-one kernel dimension is constant in t (zero, one, or
// two), conjugated by a random symplectic matrix.
inline PathSpec constant_kernel_path(std::mt19937_64& rng, int variant) {
  PathSpec base;
  switch (variant % 4) {
    case 0:
      base = path_direct_sum(pinned_shear_plane(rng), elliptic_offset_plane(rng));
      break;
    case 1:
      base = path_direct_sum(pinned_shear_plane(rng), hyperbolic_offset_plane(rng));
      break;
    case 2: {
      // kernel dimension two throughout (r = 1 degenerates to a constant path)
      std::uniform_int_distribution<int> ud(0, 1);
      base = unipotent_deformation_path(ud(rng) == 0 ? 1 : 3, 0.0);
      break;
    }
    default:
      base = path_direct_sum(hyperbolic_offset_plane(rng), elliptic_offset_plane(rng));
      break;
  }
  const Mat P = random_symplectic(rng, base.n, 2, 0.4);
  return path_conjugate_const(base, P);
}

inline void record_failure(AxiomCheck& check, std::string note, std::vector<PathSpec> paths) {
  ++check.failures;
  check.notes.push_back(std::move(note));
  for (auto& p : paths) check.counterexamples.push_back(std::move(p));
}

}  // namespace detail

// Runs the whole property suite.  `trials` scales every check; the individual
// per-check counts are derived from it deterministically.
inline AxiomSuiteReport verify_axioms(std::uint64_t seed, int trials, const Tolerances& tol = {}) {
  if (trials < 1) throw invalid_input_error("verify_axioms: trials must be positive");
  AxiomSuiteReport report;
  report.seed = seed;
  report.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim12(1, 2), dim13(1, 3);

  // --- invariance under reparameterization (integer and half-integer) ---
  {
    AxiomCheck check;
    check.name = "reparameterization-invariance";
    const int paths = std::max(1, trials / 5);
    for (int i = 0; i < paths; ++i) {
      PathSpec p = detail::random_settled_path(rng, dim13(rng));
      ++check.trials;
      try {
        const int cz = conley_zehnder(p, CircleMap::Rho, tol);
        const HalfInt rs = robbin_salamon(p, CircleMap::Rho, tol);
        for (int r = 0; r < 10; ++r) {
          const auto from = detail::random_knots(rng, 2, p.a, p.b);
          auto to = detail::random_knots(rng, 2, p.a, p.b);
          PathSpec q = path_reparameterize(p, from, to);
          const int czq = conley_zehnder(q, CircleMap::Rho, tol);
          const HalfInt rsq = robbin_salamon(q, CircleMap::Rho, tol);
          if (czq != cz || !(rsq == rs)) {
            std::ostringstream os;
            os << "index changed under reparameterization: integer " << cz << " -> " << czq
               << ", half-integer " << rs.twice << "/2 -> " << rsq.twice << "/2 (path " << i
               << ", reparam " << r << ")";
            detail::record_failure(check, os.str(), {p, q});
            break;
          }
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- additivity under catenation at a random interior split ---
  {
    AxiomCheck check;
    check.name = "catenation-additivity";
    const int paths = std::max(1, trials / 2);
    std::uniform_real_distribution<double> us(0.15, 0.85);
    for (int i = 0; i < paths; ++i) {
      PathSpec p = random_generator_path(rng, dim13(rng), 1, 3);
      const double c = p.a + (p.b - p.a) * us(rng);
      ++check.trials;
      try {
        const auto [l, r] = path_split_at(p, c);
        const HalfInt whole = robbin_salamon(p, CircleMap::Rho, tol);
        const HalfInt sum = robbin_salamon(l, CircleMap::Rho, tol) +
                            robbin_salamon(r, CircleMap::Rho, tol);
        if (!(whole == sum)) {
          std::ostringstream os;
          os << "catenation not additive at t=" << c << ": " << whole.twice << "/2 vs "
             << sum.twice << "/2 (trial " << i << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- zero on paths with constant eigenvalue-one kernel dimension ---
  {
    AxiomCheck check;
    check.name = "zero-on-constant-kernel-dimension";
    const int paths = std::max(4, 2 * trials / 5);
    for (int i = 0; i < paths; ++i) {
      PathSpec p = detail::constant_kernel_path(rng, i);
      ++check.trials;
      try {
        const HalfInt got = robbin_salamon(p, CircleMap::Rho, tol);
        if (!(got == HalfInt(0))) {
          std::ostringstream os;
          os << "nonzero index " << got.twice << "/2 on a constant-kernel path (trial " << i
             << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- half-signature value on symmetric-generator paths ---
  {
    AxiomCheck check;
    check.name = "generator-half-signature";
    for (int i = 0; i < trials; ++i) {
      const int dim = 2 * dim13(rng);
      Mat S;
      long long twice_sig = 0;
      bool found = false;
      for (int attempt = 0; attempt < 50 && !found; ++attempt) {
        S = random_symmetric_bounded(rng, dim, 2.0 * M_PI, i % 3);
        Eigen::SelfAdjointEigenSolver<Mat> es(S);
        twice_sig = 0;
        found = true;
        for (int k = 0; k < dim; ++k) {
          const double ev = es.eigenvalues()(k);
          if (ev > 1e-6)
            ++twice_sig;
          else if (ev < -1e-6)
            --twice_sig;
          else if (std::abs(ev) > 1e-12)
            found = false;  // ambiguous tiny eigenvalue; resample
        }
      }
      ++check.trials;
      try {
        const HalfInt got = robbin_salamon(path_from_generator(S), CircleMap::Rho, tol);
        if (!(got == HalfInt(twice_sig))) {
          std::ostringstream os;
          os << "generator path index " << got.twice << "/2, expected half signature "
             << twice_sig << "/2 (trial " << i << ")";
          detail::record_failure(check, os.str(), {path_from_generator(S)});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(),
                               {path_from_generator(S)});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- invariance under constant and path conjugation ---
  {
    AxiomCheck check;
    check.name = "conjugation-invariance";
    const int paths = std::max(1, trials / 2);
    for (int i = 0; i < paths; ++i) {
      const int n = dim12(rng);
      PathSpec p = random_generator_path(rng, n, 1, 2);
      const Mat P = random_symplectic(rng, n, 3, 0.5);
      PathSpec phi = random_generator_path(rng, n, 1, 2, 0.5);
      ++check.trials;
      try {
        const HalfInt base = robbin_salamon(p, CircleMap::Rho, tol);
        const HalfInt by_const = robbin_salamon(path_conjugate_const(p, P), CircleMap::Rho, tol);
        const HalfInt by_path = robbin_salamon(path_conjugate(p, phi), CircleMap::Rho, tol);
        if (!(by_const == base) || !(by_path == base)) {
          std::ostringstream os;
          os << "conjugation changed the index: base " << base.twice << "/2, constant "
             << by_const.twice << "/2, path " << by_path.twice << "/2 (trial " << i << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- determinant parity and inverse antisymmetry of the integer index ---
  {
    AxiomCheck check;
    check.name = "parity-and-inverse";
    for (int i = 0; i < trials; ++i) {
      const int n = dim13(rng);
      PathSpec p = detail::random_settled_path(rng, n, 2);
      ++check.trials;
      try {
        const int mu = conley_zehnder(p, CircleMap::Rho, tol);
        const int mu_inv = conley_zehnder(path_pointwise_inverse(p), CircleMap::Rho, tol);
        const int mu_tr = conley_zehnder(path_transpose(p), CircleMap::Rho, tol);
        const double det1 = (Mat::Identity(2 * n, 2 * n) - p.end_value()).determinant();
        const int parity = ((mu % 2) + 2) % 2;
        const int expected_parity = (det1 > 0.0) ? (n % 2) : ((n + 1) % 2);
        if (mu_inv != -mu || mu_tr != mu_inv || parity != expected_parity) {
          std::ostringstream os;
          os << "parity/inverse violation: mu=" << mu << ", inverse " << mu_inv
             << ", transpose " << mu_tr << ", det(Id - end)=" << det1 << " (trial " << i << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- antisymmetry of the half-integer index under pointwise inversion ---
  {
    AxiomCheck check;
    check.name = "half-integer-inverse-antisymmetry";
    const int paths = std::max(1, trials / 4);
    for (int i = 0; i < paths; ++i) {
      PathSpec p = random_generator_path(rng, dim12(rng), 1, 2);
      ++check.trials;
      try {
        const HalfInt mu = robbin_salamon(p, CircleMap::Rho, tol);
        const HalfInt mu_inv = robbin_salamon(path_pointwise_inverse(p), CircleMap::Rho, tol);
        if (!(mu_inv == HalfInt(-mu.twice))) {
          std::ostringstream os;
          os << "inverse not antisymmetric: " << mu.twice << "/2 vs " << mu_inv.twice
             << "/2 (trial " << i << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- loops shift the integer index by twice their winding ---
  {
    AxiomCheck check;
    check.name = "loop-shift";
    const int paths = std::max(1, trials / 4);
    for (int i = 0; i < paths; ++i) {
      const int nw = 1 + i % 3;
      PathSpec p = detail::random_settled_path(rng, 2, 2);
      ++check.trials;
      try {
        const int mu = conley_zehnder(p, CircleMap::Rho, tol);
        PathSpec shifted = path_pointwise_product(loop_phi(nw, 2), p);
        const int mu_shift = conley_zehnder(shifted, CircleMap::Rho, tol);
        if (mu_shift != mu + 2 * nw) {
          std::ostringstream os;
          os << "loop of winding " << nw << " shifted " << mu << " to " << mu_shift
             << ", expected " << (mu + 2 * nw) << " (trial " << i << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- additivity under direct sums ---
  {
    AxiomCheck check;
    check.name = "direct-sum-additivity";
    const int paths = std::max(1, trials / 4);
    for (int i = 0; i < paths; ++i) {
      PathSpec p = random_generator_path(rng, dim12(rng), 1, 2);
      PathSpec q = random_generator_path(rng, 1, 1, 2);
      ++check.trials;
      try {
        const HalfInt sum = robbin_salamon(p, CircleMap::Rho, tol) +
                            robbin_salamon(q, CircleMap::Rho, tol);
        const HalfInt whole = robbin_salamon(path_direct_sum(p, q), CircleMap::Rho, tol);
        if (!(whole == sum)) {
          std::ostringstream os;
          os << "direct sum not additive: " << whole.twice << "/2 vs " << sum.twice
             << "/2 (trial " << i << ")";
          detail::record_failure(check, os.str(), {p, q});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p, q});
      }
    }
    report.checks.push_back(std::move(check));
  }

  // --- the crossing evaluator agrees with the extension evaluator ---
  {
    AxiomCheck check;
    check.name = "two-evaluator-agreement";
    const int paths = std::max(1, trials / 2);
    int produced = 0, attempts = 0;
    while (produced < paths && attempts < 40 * paths) {
      ++attempts;
      PathSpec p = random_generator_path(rng, dim12(rng), 1, 2);
      HalfInt by_crossings;
      try {
        by_crossings = rs_crossings(p, tol);
      } catch (const regularity_error&) {
        continue;  // non-regular sample; draw another path
      }
      ++produced;
      ++check.trials;
      try {
        const HalfInt by_extension = robbin_salamon(p, CircleMap::Rho, tol);
        if (!(by_extension == by_crossings)) {
          std::ostringstream os;
          os << "evaluators disagree: crossings " << by_crossings.twice << "/2, extension "
             << by_extension.twice << "/2 (trial " << produced << ")";
          detail::record_failure(check, os.str(), {p});
        }
      } catch (const tolerance_error& e) {
        detail::record_failure(check, std::string("evaluation failed: ") + e.what(), {p});
      }
    }
    if (produced < paths)
      detail::record_failure(check, "sampling budget exhausted before reaching the trial count",
                             {});
    report.checks.push_back(std::move(check));
  }

  return report;
}

}  // namespace sympindex
