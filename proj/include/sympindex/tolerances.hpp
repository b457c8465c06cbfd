#pragma once

#include <stdexcept>
#include <string>

namespace sympindex {

// Central tolerance bundle.  Every numerically sensitive routine takes one of
// these (defaulted) instead of burying magic constants at call sites.
struct Tolerances {
  double symplectic = 1e-9;    // max-norm residual of A^T J0 A - J0
  double cluster = 1e-7;       // relative eigenvalue clustering radius
  double circle = 1e-7;        // |(|lambda|) - 1| for unit-circle classification
  double rank_rel = 1e-8;      // relative SVD rank cutoff (times largest sigma)
  double join = 1e-8;          // allowed value jump at catenation joints
  double round = 1e-4;         // max distance from computed index to a half-integer
  double herm = 1e-7;          // symmetry / Hermitian-ness residual for forms
  double deriv = 1e-6;         // finite-difference step scale (times interval length)
  double time = 1e-10;         // time resolution for crossing refinement
  double crossing = 1e-7;      // sigma_min acceptance threshold for a crossing
  double kernel_cut = 1e-6;    // sigma cutoff separating kernel from non-kernel at a crossing
  double merge = 1e-8;         // crossings closer than this are merged / re-examined
  double form_zero = 1e-8;     // relative zero threshold for quadratic-form eigenvalues
  int grid = 512;              // initial crossing-scan samples per segment
  int max_depth = 24;          // adaptive bisection depth (phase tracking & refinement)

  // A single master knob (CLI --tol / INDEX_TOOLKIT_TOL) rescales the
  // classification tolerances; structural ones stay put.
  static Tolerances with_master(double tol) {
    Tolerances t;
    t.cluster = tol;
    t.circle = tol;
    t.rank_rel = 0.1 * tol;
    t.herm = (tol > 1e-7) ? tol : 1e-7;
    return t;
  }
};

// Error taxonomy.  The CLI maps invalid_input_error -> exit 1 and
// tolerance_error (incl. regularity_error) -> exit 2.
class invalid_input_error : public std::runtime_error {
 public:
  explicit invalid_input_error(const std::string& msg) : std::runtime_error(msg) {}
};

class tolerance_error : public std::runtime_error {
 public:
  explicit tolerance_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Crossing-structure failures: non-isolated or degenerate crossings where a
// regular-crossings formula is not applicable.
class regularity_error : public tolerance_error {
 public:
  explicit regularity_error(const std::string& msg) : tolerance_error(msg) {}
};

// Internal consistency guard; reaching this indicates a bug, not bad input.
class construction_error : public std::logic_error {
 public:
  explicit construction_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace sympindex
