#pragma once

#include "sympindex/crossings.hpp"
#include "sympindex/extension.hpp"
#include "sympindex/forms.hpp"
#include "sympindex/winding.hpp"

namespace sympindex {

// ---------------------------------------------------------------------------
// Integer index of a path from Id to Sp* (degree of a squared circle map
// along the path followed by its canonical extension).
// ---------------------------------------------------------------------------

struct CzReport {
  int index = 0;
  double winding = 0.0;  // raw winding of the squared map, close to the integer
  CircleMap map = CircleMap::Rho;
};

// The path followed by the canonical extension of its endpoint; the squared
// circle map is a loop along the result.
inline PathSpec cz_closed_path(const PathSpec& p, const Tolerances& tol = {}) {
  const Mat A0 = p.start_value();
  const int dim = static_cast<int>(A0.rows());
  if ((A0 - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8)
    throw invalid_input_error("the integer index expects a path starting at the identity");
  Tolerances itol = tol;
  itol.join = 1e-6;
  return path_catenate(path_with_domain(p, 0.0, 1.0), cz_extension(p.end_value(), tol), itol);
}

inline CzReport conley_zehnder_report(const PathSpec& p, CircleMap map = CircleMap::Rho,
                                      const Tolerances& tol = {}) {
  const PathSpec closed = cz_closed_path(p, tol);
  CzReport r;
  r.map = map;
  r.winding = winding(closed, map, /*square=*/true, tol).total_winding;
  r.index = round_to_integer(r.winding, tol.round);
  return r;
}

inline int conley_zehnder(const PathSpec& p, CircleMap map = CircleMap::Rho,
                          const Tolerances& tol = {}) {
  return conley_zehnder_report(p, map, tol).index;
}

// All three circle maps against one shared extension.
inline std::vector<CzReport> conley_zehnder_all(const PathSpec& p, const Tolerances& tol = {}) {
  const PathSpec closed = cz_closed_path(p, tol);
  std::vector<CzReport> out;
  for (CircleMap map : {CircleMap::Rho, CircleMap::Polar, CircleMap::Chat}) {
    CzReport r;
    r.map = map;
    r.winding = winding(closed, map, /*square=*/true, tol).total_winding;
    r.index = round_to_integer(r.winding, tol.round);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Half-integer index of an arbitrary symplectic path, via the two-sided
// extension: twice the index is 2 deg + correction(start) - correction(end),
// where the corrections are signature sums of the higher forms at
// eigenvalue 1 of the respective endpoint.
// ---------------------------------------------------------------------------

struct RsReport {
  HalfInt index;
  double winding = 0.0;  // raw winding of the squared map along the extension
  int degree = 0;
  int correction_start = 0;
  int correction_end = 0;
  CircleMap map = CircleMap::Rho;
};

inline RsReport robbin_salamon_report(const PathSpec& p, CircleMap map = CircleMap::Rho,
                                      const Tolerances& tol = {}) {
  const PathSpec ext = rs_extension(p, tol);
  RsReport r;
  r.map = map;
  r.winding = winding(ext, map, /*square=*/true, tol).total_winding;
  r.degree = round_to_integer(r.winding, tol.round);
  r.correction_start = qhat_sign_correction(p.start_value(), tol);
  r.correction_end = qhat_sign_correction(p.end_value(), tol);
  r.index = HalfInt{2 * r.degree + r.correction_start - r.correction_end};
  return r;
}

inline HalfInt robbin_salamon(const PathSpec& p, CircleMap map = CircleMap::Rho,
                              const Tolerances& tol = {}) {
  return robbin_salamon_report(p, map, tol).index;
}

// ---------------------------------------------------------------------------
// Half-integer index by the crossing formula: half the signature of the
// crossing form at the endpoints, the full signature at interior crossings.
// Requires all crossings to be regular (nondegenerate crossing form) and
// finitely many of them.
// ---------------------------------------------------------------------------

struct RsCrossingsReport {
  HalfInt index;
  std::vector<Crossing> crossings;
};

inline RsCrossingsReport rs_crossings_report(const PathSpec& p, const Tolerances& tol = {}) {
  CrossingScan scan = detect_crossings(p, tol);
  if (scan.continuum)
    throw regularity_error(
        "path has a continuum of crossings; the crossing formula does not apply");
  int twice = 0;
  for (const auto& c : scan.crossings) {
    if (!c.regular) {
      std::ostringstream os;
      os << "degenerate crossing at t = " << c.t << " (signature " << c.sig.positive << "/"
         << c.sig.negative << "/" << c.sig.zero << ")";
      throw regularity_error(os.str());
    }
    const int s = c.sig.sign();
    twice += (c.at_start || c.at_end) ? s : 2 * s;
  }
  RsCrossingsReport r;
  r.index = HalfInt{twice};
  r.crossings = std::move(scan.crossings);
  return r;
}

inline HalfInt rs_crossings(const PathSpec& p, const Tolerances& tol = {}) {
  return rs_crossings_report(p, tol).index;
}

}  // namespace sympindex
