#pragma once

#include <functional>
#include <vector>

#include "sympindex/forms.hpp"
#include "sympindex/path.hpp"

namespace sympindex {

// Golden-section minimization of a scalar function on [lo, hi].
inline std::pair<double, double> golden_minimize(const std::function<double(double)>& fn,
                                                 double lo, double hi, double xtol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);  // 0.618...
  double c = hi - gr * (hi - lo);
  double d = lo + gr * (hi - lo);
  double fc = fn(c), fd = fn(d);
  while (hi - lo > xtol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - gr * (hi - lo);
      fc = fn(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + gr * (hi - lo);
      fd = fn(d);
    }
  }
  const double xm = 0.5 * (lo + hi);
  return {xm, fn(xm)};
}

inline double sigma_min(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

struct Crossing {
  double t = 0.0;
  double sigma = 0.0;       // sigma_min(psi(t) - Id) after refinement
  bool at_start = false;
  bool at_end = false;
  Subspace kernel;          // Ker(psi(t) - Id)
  Mat gamma;                // crossing form: generator restricted to the kernel
  Signature sig;
  bool regular = false;
};

struct CrossingScan {
  std::vector<Crossing> crossings;
  bool continuum = false;
  std::vector<std::pair<double, double>> plateaus;  // intervals with sigma_min ~ 0
};

namespace detail {

// Crossing form at time t: Gamma = K^T S(t) K on the kernel frame K.  At a
// catenation joint the two one-sided generators must agree on the kernel.
inline void fill_crossing_form(const PathSpec& p, Crossing& c, const Tolerances& tol) {
  const Mat psi = p.value(c.t);
  Eigen::JacobiSVD<Mat> svd(psi - Mat::Identity(psi.rows(), psi.cols()), Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = tol.kernel_cut * std::max(1.0, psi.cwiseAbs().maxCoeff());
  int k = 0;
  for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
    if (sv(i) <= cut) ++k;
    else break;
  }
  if (k == 0)
    throw construction_error("crossing accepted but kernel is empty at the kernel cutoff");
  const Mat K = svd.matrixV().rightCols(k);
  c.kernel = Subspace::from_real(K);

  auto restricted = [&](Side side) -> std::optional<Mat> {
    try {
      const Mat S = generator_s(p, c.t, side, tol);
      return Mat(K.transpose() * S * K);
    } catch (const joint_derivative_error&) {
      return std::nullopt;
    }
  };
  std::optional<Mat> g = restricted(Side::Auto);
  if (!g) {
    const std::optional<Mat> gl = restricted(Side::Left);
    const std::optional<Mat> gr = restricted(Side::Right);
    if (gl && gr) {
      const double scale = std::max(1.0, gl->cwiseAbs().maxCoeff());
      if ((*gl - *gr).cwiseAbs().maxCoeff() > 1e-5 * scale) {
        std::ostringstream os;
        os << "crossing at a corner t = " << c.t
           << " where the one-sided generators disagree on the kernel";
        throw regularity_error(os.str());
      }
      g = 0.5 * (*gl + *gr);
    } else {
      g = gl ? gl : gr;
    }
  }
  if (!g) throw construction_error("no generator available at crossing");
  c.gamma = 0.5 * (*g + g->transpose());
  c.sig = form_signature(c.gamma, tol);
  c.regular = (c.sig.zero == 0);
}

}  // namespace detail

// Scans sigma_min(psi(t) - Id) on a per-segment grid, refines every local
// minimum by golden section, and classifies isolated crossings vs plateaus
// (continuum families).
inline CrossingScan detect_crossings(const PathSpec& p, const Tolerances& tol = {}) {
  CrossingScan scan;
  const double len = p.length();
  const double xtol = tol.time * std::max(1.0, len);
  auto sig_of = [&](double t) {
    return sigma_min(p.value(t) - Mat::Identity(2 * p.n, 2 * p.n));
  };
  auto accept_sigma = [&](double t, double s) {
    return s < tol.crossing * std::max(1.0, p.value(t).cwiseAbs().maxCoeff());
  };

  std::vector<std::pair<double, double>> candidates;  // (t, sigma)
  for (const auto& seg : p.segments) {
    const int N = tol.grid;
    std::vector<double> ts(N + 1), ss(N + 1);
    for (int i = 0; i <= N; ++i) {
      ts[i] = seg.t0 + seg.length() * static_cast<double>(i) / N;
      ss[i] = sig_of(ts[i]);
    }
    // plateau detection: > 2 consecutive cells below the crossing threshold
    int run_start = -1;
    for (int i = 0; i <= N; ++i) {
      const bool low = accept_sigma(ts[i], ss[i]);
      if (low && run_start < 0) run_start = i;
      if ((!low || i == N) && run_start >= 0) {
        const int run_end = low ? i : i - 1;
        if (run_end - run_start > 2) {
          scan.continuum = true;
          scan.plateaus.emplace_back(ts[run_start], ts[run_end]);
        }
        run_start = -1;
      }
    }
    // endpoint candidates
    candidates.emplace_back(ts[0], ss[0]);
    candidates.emplace_back(ts[N], ss[N]);
    // interior local minima, refined
    for (int i = 1; i < N; ++i) {
      if (ss[i] <= ss[i - 1] && ss[i] <= ss[i + 1]) {
        auto [tm, sm] = golden_minimize(sig_of, ts[i - 1], ts[i + 1], xtol);
        candidates.emplace_back(tm, sm);
      }
    }
  }

  // keep candidates below the acceptance threshold
  std::vector<std::pair<double, double>> hits;
  for (auto& [t, s] : candidates)
    if (accept_sigma(t, s)) hits.emplace_back(t, s);
  if (hits.empty()) return scan;
  std::sort(hits.begin(), hits.end());

  // snap to domain endpoints, then merge near-coincident hits
  const double snap = std::max(1e3 * tol.time, 1e-7) * std::max(1.0, len);
  for (auto& [t, s] : hits) {
    if (std::abs(t - p.a) <= snap) t = p.a;
    if (std::abs(t - p.b) <= snap) t = p.b;
  }
  std::vector<std::pair<double, double>> merged;
  const double mtol = tol.merge * std::max(1.0, len);
  for (const auto& h : hits) {
    if (!merged.empty() && h.first - merged.back().first <= std::max(mtol, snap)) {
      if (h.second < merged.back().second) merged.back() = h;  // keep the deeper one
    } else {
      merged.push_back(h);
    }
  }

  for (const auto& [t, s] : merged) {
    Crossing c;
    c.t = t;
    c.sigma = s;
    c.at_start = (t == p.a);
    c.at_end = (t == p.b);
    detail::fill_crossing_form(p, c, tol);
    scan.crossings.push_back(std::move(c));
  }
  return scan;
}

}  // namespace sympindex
