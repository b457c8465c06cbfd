#pragma once

#include <algorithm>
#include <vector>

#include "sympindex/path.hpp"
#include "sympindex/rho.hpp"

namespace sympindex {

// Continuous phase of a circle map along a path, tracked adaptively: each
// interval is bisected until the phase jump between neighbors is <= pi/2 (so
// no winding can hide between samples of a continuous map), up to max_depth
// halvings.  The initial grid follows the path's own structure: sampled
// segments seed the tracker at their interpolation nodes and exponential
// segments scale the seed count with the generator content, so a fast phase
// excursion localized well below a uniform grid spacing is still straddled by
// probes.
struct PhaseTrace {
  std::vector<double> times;
  std::vector<double> phases;  // unwrapped, phases[0] = arg at the start
  double total_winding = 0.0;  // (phase(b) - phase(a)) / 2pi
  int max_depth_used = 0;
};

namespace detail {

inline void segment_initial_knots(const Segment& seg, int min_count, std::vector<double>& out);

// Appends, in the path's own time coordinates, every initial probe boundary
// its segments ask for (interior knots plus each segment's right endpoint).
inline void path_initial_knots(const PathSpec& p, int min_count, std::vector<double>& out) {
  for (const auto& seg : p.segments) segment_initial_knots(seg, min_count, out);
}

inline void segment_initial_knots(const Segment& seg, int min_count, std::vector<double>& out) {
  constexpr double kContentPerKnot = 0.25;  // max generator norm per initial interval
  constexpr int kMaxKnots = 8192;
  const double len = seg.length();
  for (int i = 1; i <= min_count; ++i)
    out.push_back(seg.t0 + len * static_cast<double>(i) / min_count);
  switch (seg.kind) {
    case SegmentKind::ExpGenerator:
    case SegmentKind::LeftExp: {
      const double content = seg.kind == SegmentKind::ExpGenerator
                                 ? std::abs(seg.rate) * seg.S.norm()
                                 : seg.X.norm();
      const int count = std::clamp(static_cast<int>(std::ceil(content / kContentPerKnot)),
                                   min_count, kMaxKnots);
      for (int i = 1; i <= count; ++i)
        out.push_back(seg.t0 + len * static_cast<double>(i) / count);
      return;
    }
    case SegmentKind::Constant:
      return;
    case SegmentKind::Sampled:
      for (size_t i = 1; i < seg.times.size(); ++i) out.push_back(seg.times[i]);
      return;
    case SegmentKind::DirectSumOf:
    case SegmentKind::ConjugationOf: {
      for (const auto& cp : {seg.child_a, seg.child_b}) {
        if (!cp || cp->length() <= 0.0) continue;
        std::vector<double> child;
        path_initial_knots(*cp, min_count, child);
        for (double tc : child)
          out.push_back(std::clamp(seg.t0 + len * ((tc - cp->a) / cp->length()), seg.t0, seg.t1));
      }
      return;
    }
    case SegmentKind::Reversed: {
      if (!seg.child_a || seg.child_a->length() <= 0.0) return;
      std::vector<double> child;
      path_initial_knots(*seg.child_a, min_count, child);
      for (double tc : child)
        out.push_back(std::clamp(
            seg.t0 + len * ((seg.child_a->b - tc) / seg.child_a->length()), seg.t0, seg.t1));
      return;
    }
  }
}

struct PhaseTracker {
  const PathSpec& p;
  CircleMap map;
  bool square;
  const Tolerances& tol;
  PhaseTrace trace;
  double phase = 0.0;

  Complex eval(double t) const {
    Complex z = circle_map_value(p.value(t), map, tol);
    if (square) z *= z;
    return z;
  }

  void commit(double t, double delta, int depth) {
    phase += delta;
    trace.times.push_back(t);
    trace.phases.push_back(phase);
    trace.max_depth_used = std::max(trace.max_depth_used, depth);
  }

  // An interval is only accepted once a midpoint sample confirms that both
  // half-jumps are small and additive, and a quarter-point audit confirms the
  // same one level down; a principal-value jump alone can alias a full extra
  // turn, and without the audit so can a fast excursion confined to one half.
  // At least one bisection level is always performed.
  void refine(double ta, Complex za, double tb, Complex zb, int depth) {
    if (depth >= tol.max_depth) {
      std::ostringstream os;
      os << "phase tracking did not converge near t = " << 0.5 * (ta + tb) << " (after "
         << depth << " halvings)";
      throw tolerance_error(os.str());
    }
    const double tm = 0.5 * (ta + tb);
    const Complex zm = eval(tm);
    const double left = std::arg(zm / za);
    const double right = std::arg(zb / zm);
    const double whole = std::arg(zb / za);
    if (depth >= 1 && std::abs(left) <= 0.5 * M_PI && std::abs(right) <= 0.5 * M_PI &&
        std::abs(left + right - whole) <= 1e-6) {
      const double tq1 = 0.5 * (ta + tm);
      const double tq2 = 0.5 * (tm + tb);
      const Complex zq1 = eval(tq1);
      const Complex zq2 = eval(tq2);
      const double l1 = std::arg(zq1 / za);
      const double l2 = std::arg(zm / zq1);
      const double r1 = std::arg(zq2 / zm);
      const double r2 = std::arg(zb / zq2);
      if (std::abs(l1) <= 0.5 * M_PI && std::abs(l2) <= 0.5 * M_PI &&
          std::abs(l1 + l2 - left) <= 1e-6 && std::abs(r1) <= 0.5 * M_PI &&
          std::abs(r2) <= 0.5 * M_PI && std::abs(r1 + r2 - right) <= 1e-6) {
        commit(tq1, l1, depth);
        commit(tm, l2, depth);
        commit(tq2, r1, depth);
        commit(tb, r2, depth);
        return;
      }
    }
    refine(ta, za, tm, zm, depth + 1);
    refine(tm, zm, tb, zb, depth + 1);
  }
};

}  // namespace detail

inline PhaseTrace winding(const PathSpec& p, CircleMap map = CircleMap::Rho,
                          bool square = false, const Tolerances& tol = {},
                          int initial_per_segment = 16) {
  detail::PhaseTracker tracker{p, map, square, tol, {}, 0.0};
  Complex za = tracker.eval(p.a);
  tracker.phase = std::arg(za);
  tracker.trace.times.push_back(p.a);
  tracker.trace.phases.push_back(tracker.phase);
  double ta = p.a;
  for (const auto& seg : p.segments) {
    std::vector<double> knots;
    detail::segment_initial_knots(seg, initial_per_segment, knots);
    std::sort(knots.begin(), knots.end());
    const double merge_eps = 1e-12 * std::max(1.0, seg.length());
    knots.erase(std::unique(knots.begin(), knots.end(),
                            [&](double x, double y) { return std::abs(x - y) <= merge_eps; }),
                knots.end());
    if (knots.empty()) knots.push_back(seg.t1);
    knots.back() = seg.t1;
    for (double tb : knots) {
      if (tb <= ta) continue;
      const Complex zb = tracker.eval(tb);
      tracker.refine(ta, za, tb, zb, 0);
      ta = tb;
      za = zb;
    }
  }
  tracker.trace.total_winding =
      (tracker.trace.phases.back() - tracker.trace.phases.front()) / (2.0 * M_PI);
  return tracker.trace;
}

}  // namespace sympindex
