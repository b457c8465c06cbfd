#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <unsupported/Eigen/MatrixFunctions>
#include <utility>
#include <vector>

#include "sympindex/core.hpp"

namespace sympindex {

struct PathSpec;

enum class SegmentKind { ExpGenerator, LeftExp, Constant, Sampled, DirectSumOf, ConjugationOf, Reversed };
enum class Side { Auto, Left, Right };

class joint_derivative_error : public invalid_input_error {
 public:
  explicit joint_derivative_error(const std::string& msg) : invalid_input_error(msg) {}
};

// One piece of a piecewise path over [t0, t1].  All kinds evaluate through the
// normalized local coordinate f = (t - t0)/(t1 - t0) in [0, 1], which makes
// affine time reparameterization a pure relabeling of (t0, t1).
struct Segment {
  SegmentKind kind = SegmentKind::Constant;
  double t0 = 0.0, t1 = 1.0;

  // ExpGenerator: value = exp(f * rate * J0 S) * start
  Mat S;
  double rate = 1.0;
  // LeftExp: value = exp(f * X) * start
  Mat X;
  // ExpGenerator / LeftExp / Constant
  Mat start;
  // Sampled: nodes (strictly increasing, covering [t0, t1]) with geodesic
  // interpolation value = A_i * exp(g * L_i), L_i = log(A_i^{-1} A_{i+1})
  std::vector<double> times;
  std::vector<Mat> mats;
  std::vector<Mat> logs;  // precomputed
  // DirectSumOf: (child_a (+) child_b), ConjugationOf: child_b * child_a * child_b^{-1},
  // Reversed: child_a traversed backwards.  Children keep their own domains and
  // are addressed through f.
  std::shared_ptr<const PathSpec> child_a, child_b;

  double length() const { return t1 - t0; }
};

struct PathSpec {
  int n = 0;            // half-dimension: matrices are 2n x 2n
  double a = 0.0, b = 1.0;
  std::vector<Segment> segments;

  double length() const { return b - a; }
  Mat value(double t) const;
  Mat derivative(double t, Side side = Side::Auto) const;
  Mat start_value() const { return value(a); }
  Mat end_value() const { return value(b); }
  std::vector<double> joint_times() const {
    std::vector<double> ts{a};
    for (const auto& s : segments) ts.push_back(s.t1);
    return ts;
  }
};

namespace detail {

inline double child_time(const PathSpec& child, double f) {
  return child.a + f * (child.b - child.a);
}

inline Mat exp_mat(const Mat& X) { return X.exp(); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

inline Mat segment_value(const Segment& s, double f) {
  switch (s.kind) {
    case SegmentKind::ExpGenerator: {
      const int n = static_cast<int>(s.S.rows()) / 2;
      return detail::exp_mat(Mat(f * s.rate * J0(n) * s.S)) * s.start;
    }
    case SegmentKind::LeftExp:
      return detail::exp_mat(Mat(f * s.X)) * s.start;
    case SegmentKind::Constant:
      return s.start;
    case SegmentKind::Sampled: {
      const double t = s.t0 + f * s.length();
      auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
      int i = static_cast<int>(it - s.times.begin()) - 1;
      i = std::clamp(i, 0, static_cast<int>(s.times.size()) - 2);
      const double g = (t - s.times[i]) / (s.times[i + 1] - s.times[i]);
      if (g <= 0.0) return s.mats[i];
      if (g >= 1.0) return s.mats[i + 1];
      return s.mats[i] * detail::exp_mat(Mat(g * s.logs[i]));
    }
    case SegmentKind::DirectSumOf:
      return direct_sum(s.child_a->value(detail::child_time(*s.child_a, f)),
                        s.child_b->value(detail::child_time(*s.child_b, f)));
    case SegmentKind::ConjugationOf: {
      const Mat c = s.child_b->value(detail::child_time(*s.child_b, f));
      const Mat base = s.child_a->value(detail::child_time(*s.child_a, f));
      return c * base * c.inverse();
    }
    case SegmentKind::Reversed:
      return s.child_a->value(s.child_a->b - f * (s.child_a->b - s.child_a->a));
  }
  throw construction_error("unknown segment kind");
}

inline Mat segment_derivative(const Segment& s, double f, Side side = Side::Auto);

inline Mat PathSpec::value(double t) const {
  const double eps = 1e-9 * std::max(1.0, std::abs(b - a));
  if (t < a - eps || t > b + eps) {
    std::ostringstream os;
    os << "time " << t << " outside path domain [" << a << ", " << b << "]";
    throw invalid_input_error(os.str());
  }
  t = std::clamp(t, a, b);
  for (const auto& s : segments) {
    if (t <= s.t1 || &s == &segments.back()) {
      const double f = (s.length() > 0.0) ? std::clamp((t - s.t0) / s.length(), 0.0, 1.0) : 0.0;
      return segment_value(s, f);
    }
  }
  throw construction_error("path has no segments");
}

inline Mat segment_derivative(const Segment& s, double f, Side side) {
  const double invL = 1.0 / s.length();
  switch (s.kind) {
    case SegmentKind::ExpGenerator: {
      const int n = static_cast<int>(s.S.rows()) / 2;
      const Mat X = s.rate * J0(n) * s.S;
      return invL * X * segment_value(s, f);
    }
    case SegmentKind::LeftExp:
      return invL * s.X * segment_value(s, f);
    case SegmentKind::Constant:
      return Mat::Zero(s.start.rows(), s.start.cols());
    case SegmentKind::Sampled: {
      const double t = s.t0 + f * s.length();
      auto it = std::upper_bound(s.times.begin(), s.times.end(), t);
      int i = static_cast<int>(it - s.times.begin()) - 1;
      i = std::clamp(i, 0, static_cast<int>(s.times.size()) - 2);
      const double dt = s.times[i + 1] - s.times[i];
      const double g = std::clamp((t - s.times[i]) / dt, 0.0, 1.0);
      return s.mats[i] * detail::exp_mat(Mat(g * s.logs[i])) * s.logs[i] / dt;
    }
    case SegmentKind::DirectSumOf: {
      const double ca = (s.child_a->b - s.child_a->a) * invL;
      const double cb = (s.child_b->b - s.child_b->a) * invL;
      return direct_sum(Mat(ca * s.child_a->derivative(detail::child_time(*s.child_a, f), side)),
                        Mat(cb * s.child_b->derivative(detail::child_time(*s.child_b, f), side)));
    }
    case SegmentKind::ConjugationOf: {
      const double ca = (s.child_a->b - s.child_a->a) * invL;
      const double cb = (s.child_b->b - s.child_b->a) * invL;
      const Mat c = s.child_b->value(detail::child_time(*s.child_b, f));
      const Mat cinv = c.inverse();
      const Mat base = s.child_a->value(detail::child_time(*s.child_a, f));
      const Mat dbase = ca * s.child_a->derivative(detail::child_time(*s.child_a, f), side);
      const Mat dc = cb * s.child_b->derivative(detail::child_time(*s.child_b, f), side);
      const Mat V = c * base * cinv;
      const Mat W = dc * cinv;
      return W * V - V * W + c * dbase * cinv;
    }
    case SegmentKind::Reversed: {
      const double ca = (s.child_a->b - s.child_a->a) * invL;
      const Side flipped = (side == Side::Left) ? Side::Right
                          : (side == Side::Right) ? Side::Left
                                                  : Side::Auto;
      return -ca *
             s.child_a->derivative(s.child_a->b - f * (s.child_a->b - s.child_a->a), flipped);
    }
  }
  throw construction_error("unknown segment kind");
}

inline Mat PathSpec::derivative(double t, Side side) const {
  const double eps = 1e-9 * std::max(1.0, std::abs(b - a));
  if (t < a - eps || t > b + eps)
    throw invalid_input_error("derivative: time outside path domain");
  t = std::clamp(t, a, b);
  // find the surrounding segment, honoring the side at joints
  const double jeps = 1e-12 * std::max(1.0, std::abs(b - a));
  for (size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const bool at_left = std::abs(t - s.t0) <= jeps;
    const bool at_right = std::abs(t - s.t1) <= jeps;
    if (t > s.t1 + jeps && i + 1 < segments.size()) continue;
    if (at_left && i > 0 && side == Side::Auto)
      throw joint_derivative_error("derivative requested exactly at a catenation joint; "
                                   "pass an explicit side");
    if (at_left && i > 0 && side == Side::Left)
      return segment_derivative(segments[i - 1], 1.0, side);
    const double f = (s.length() > 0.0) ? std::clamp((t - s.t0) / s.length(), 0.0, 1.0) : 0.0;
    if (at_right && side == Side::Right && i + 1 < segments.size())
      return segment_derivative(segments[i + 1], 0.0, side);
    if (at_right && side == Side::Auto && i + 1 < segments.size())
      throw joint_derivative_error("derivative requested exactly at a catenation joint; "
                                   "pass an explicit side");
    return segment_derivative(s, f, side);
  }
  throw construction_error("path has no segments");
}

// Hamiltonian generator S(t) with psi' = J0 S psi, i.e. S = -J0 psi' psi^{-1};
// the result is symmetrized, with the asymmetry checked against herm_tol.
inline Mat generator_s(const PathSpec& p, double t, Side side = Side::Auto,
                       const Tolerances& tol = {}) {
  const Mat dpsi = p.derivative(t, side);
  const Mat psi = p.value(t);
  const Mat S = -J0(p.n) * dpsi * psi.inverse();
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 10.0 * tol.herm * scale) {
    std::ostringstream os;
    os << "path generator is not symmetric: residual " << asym << " at scale " << scale
       << " (path leaves the symplectic group?)";
    throw tolerance_error(os.str());
  }
  return 0.5 * (S + S.transpose());
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_and_finalize(PathSpec& p, const Tolerances& tol) {
  if (p.segments.empty()) throw invalid_input_error("path has no segments");
  if (!(p.b > p.a)) throw invalid_input_error("path domain is empty");
  const double eps = 1e-9 * std::max(1.0, p.b - p.a);
  if (std::abs(p.segments.front().t0 - p.a) > eps || std::abs(p.segments.back().t1 - p.b) > eps)
    throw invalid_input_error("segments do not cover the path domain");
  for (size_t i = 0; i + 1 < p.segments.size(); ++i) {
    if (std::abs(p.segments[i].t1 - p.segments[i + 1].t0) > eps)
      throw invalid_input_error("segments are not contiguous");
    const Mat left = segment_value(p.segments[i], 1.0);
    const Mat right = segment_value(p.segments[i + 1], 0.0);
    const double scale = std::max(1.0, left.cwiseAbs().maxCoeff());
    const double jump = (left - right).cwiseAbs().maxCoeff();
    if (jump > tol.join * scale * 10.0) {
      std::ostringstream os;
      os << "discontinuity " << jump << " at joint t = " << p.segments[i].t1;
      throw invalid_input_error(os.str());
    }
  }
}

}  // namespace detail

inline PathSpec path_from_generator(const Mat& S, double rate = 1.0,
                                    double a = 0.0, double b = 1.0,
                                    std::optional<Mat> start = std::nullopt,
                                    const Tolerances& tol = {}) {
  const int n = static_cast<int>(S.rows()) / 2;
  if (S.rows() != S.cols() || S.rows() % 2 != 0)
    throw invalid_input_error("generator must be 2n x 2n");
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol.herm * std::max(1.0, S.cwiseAbs().maxCoeff()))
    throw invalid_input_error("generator must be symmetric");
  Segment seg;
  seg.kind = SegmentKind::ExpGenerator;
  seg.t0 = a;
  seg.t1 = b;
  seg.S = 0.5 * (S + S.transpose());
  seg.rate = rate;
  seg.start = start.value_or(Mat::Identity(2 * n, 2 * n));
  require_symplectic(seg.start, 1e-6, "path start value");
  PathSpec p;
  p.n = n;
  p.a = a;
  p.b = b;
  p.segments.push_back(std::move(seg));
  return p;
}

inline PathSpec path_left_exp(const Mat& X, const Mat& start, double a = 0.0, double b = 1.0) {
  Segment seg;
  seg.kind = SegmentKind::LeftExp;
  seg.t0 = a;
  seg.t1 = b;
  seg.X = X;
  seg.start = start;
  PathSpec p;
  p.n = static_cast<int>(X.rows()) / 2;
  p.a = a;
  p.b = b;
  p.segments.push_back(std::move(seg));
  return p;
}

inline PathSpec path_constant(const Mat& A, double a = 0.0, double b = 1.0) {
  Segment seg;
  seg.kind = SegmentKind::Constant;
  seg.t0 = a;
  seg.t1 = b;
  seg.start = A;
  PathSpec p;
  p.n = static_cast<int>(A.rows()) / 2;
  p.a = a;
  p.b = b;
  p.segments.push_back(std::move(seg));
  return p;
}

// Geodesic-interpolated sample path.  Consecutive samples must be close enough
// that A_i^{-1} A_{i+1} has no spectrum on the closed negative real axis.
inline PathSpec path_sampled(const std::vector<double>& times, const std::vector<Mat>& mats,
                             const Tolerances& tol = {}) {
  if (times.size() != mats.size() || times.size() < 2)
    throw invalid_input_error("sampled path needs matching times/matrices, at least two");
  for (size_t i = 0; i + 1 < times.size(); ++i)
    if (!(times[i + 1] > times[i]))
      throw invalid_input_error("sampled path times must be strictly increasing");
  Segment seg;
  seg.kind = SegmentKind::Sampled;
  seg.t0 = times.front();
  seg.t1 = times.back();
  seg.times = times;
  seg.mats = mats;
  const int dim = static_cast<int>(mats.front().rows());
  for (const auto& m : mats) {
    if (m.rows() != dim || m.cols() != dim)
      throw invalid_input_error("sampled path matrices must share one dimension");
    require_symplectic(m, 1e-6, "sampled path node");
  }
  seg.logs.reserve(mats.size() - 1);
  for (size_t i = 0; i + 1 < mats.size(); ++i) {
    const Mat R = mats[i].inverse() * mats[i + 1];
    const Eigen::VectorXcd ev = R.eigenvalues();
    for (int k = 0; k < ev.size(); ++k) {
      const Complex lam = ev(k);
      if (std::abs(lam) < 1e-12 ||
          (lam.real() < 0.0 && std::abs(lam.imag()) <= 1e-9 * std::abs(lam))) {
        std::ostringstream os;
        os << "sampled path: consecutive samples at t = " << times[i] << ", " << times[i + 1]
           << " are too far apart for geodesic interpolation (transition eigenvalue " << lam
           << " on the negative real axis)";
        throw invalid_input_error(os.str());
      }
    }
    seg.logs.push_back(R.log());
  }
  PathSpec p;
  p.n = dim / 2;
  p.a = seg.t0;
  p.b = seg.t1;
  p.segments.push_back(std::move(seg));
  return p;
}

// Affine relabeling of the time axis onto [na, nb] (exact for every kind).
inline PathSpec path_with_domain(const PathSpec& p, double na, double nb) {
  if (!(nb > na)) throw invalid_input_error("empty target domain");
  PathSpec q = p;
  q.a = na;
  q.b = nb;
  const double sc = (nb - na) / (p.b - p.a);
  for (auto& s : q.segments) {
    const double t0 = na + (s.t0 - p.a) * sc;
    const double t1 = na + (s.t1 - p.a) * sc;
    if (s.kind == SegmentKind::Sampled) {
      for (auto& t : s.times) t = na + (t - p.a) * sc;
      s.times.front() = t0;
      s.times.back() = t1;
    }
    s.t0 = t0;
    s.t1 = t1;
  }
  return q;
}

inline PathSpec path_catenate(const PathSpec& p, const PathSpec& q_in, const Tolerances& tol = {}) {
  if (p.n != q_in.n) throw invalid_input_error("catenation: dimension mismatch");
  const PathSpec q = path_with_domain(q_in, p.b, p.b + q_in.length());
  const Mat pe = p.end_value(), qs = q.start_value();
  const double scale = std::max(1.0, pe.cwiseAbs().maxCoeff());
  const double jump = (pe - qs).cwiseAbs().maxCoeff();
  if (jump > tol.join * scale * 10.0) {
    std::ostringstream os;
    os << "catenation endpoint mismatch: " << jump << " at scale " << scale;
    throw invalid_input_error(os.str());
  }
  PathSpec r;
  r.n = p.n;
  r.a = p.a;
  r.b = q.b;
  r.segments = p.segments;
  r.segments.insert(r.segments.end(), q.segments.begin(), q.segments.end());
  return r;
}

inline PathSpec path_catenate(const std::vector<PathSpec>& parts, const Tolerances& tol = {}) {
  if (parts.empty()) throw invalid_input_error("catenation of nothing");
  PathSpec acc = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) acc = path_catenate(acc, parts[i], tol);
  return acc;
}

// (p (+) q)(t) = p(t) (+) q(t') with q traversed affinely over p's domain.
inline PathSpec path_direct_sum(const PathSpec& p, const PathSpec& q) {
  Segment seg;
  seg.kind = SegmentKind::DirectSumOf;
  seg.t0 = p.a;
  seg.t1 = p.b;
  seg.child_a = std::make_shared<PathSpec>(p);
  seg.child_b = std::make_shared<PathSpec>(q);
  PathSpec r;
  r.n = p.n + q.n;
  r.a = p.a;
  r.b = p.b;
  r.segments.push_back(std::move(seg));
  return r;
}

// t -> c(t) p(t) c(t)^{-1} with the conjugator path c traversed affinely.
inline PathSpec path_conjugate(const PathSpec& base, const PathSpec& conj) {
  if (base.n != conj.n) throw invalid_input_error("conjugation: dimension mismatch");
  Segment seg;
  seg.kind = SegmentKind::ConjugationOf;
  seg.t0 = base.a;
  seg.t1 = base.b;
  seg.child_a = std::make_shared<PathSpec>(base);
  seg.child_b = std::make_shared<PathSpec>(conj);
  PathSpec r;
  r.n = base.n;
  r.a = base.a;
  r.b = base.b;
  r.segments.push_back(std::move(seg));
  return r;
}

inline PathSpec path_conjugate_const(const PathSpec& base, const Mat& P) {
  return path_conjugate(base, path_constant(P, base.a, base.b));
}

// Reversal, segment by segment so downstream per-segment scans keep their
// granularity: result(t) = p(a + b - t) over the same domain.
inline PathSpec path_reverse(const PathSpec& p) {
  PathSpec r;
  r.n = p.n;
  r.a = p.a;
  r.b = p.b;
  for (auto it = p.segments.rbegin(); it != p.segments.rend(); ++it) {
    auto child = std::make_shared<PathSpec>();
    child->n = p.n;
    child->a = it->t0;
    child->b = it->t1;
    child->segments.push_back(*it);
    Segment seg;
    seg.kind = SegmentKind::Reversed;
    seg.t0 = p.a + (p.b - it->t1);
    seg.t1 = p.a + (p.b - it->t0);
    seg.child_a = std::move(child);
    r.segments.push_back(std::move(seg));
  }
  return r;
}

// Pointwise inverse t -> p(t)^{-1}, exact per segment kind.
inline PathSpec path_pointwise_inverse(const PathSpec& p);
// Pointwise transpose t -> p(t)^T, exact per segment kind.
inline PathSpec path_transpose(const PathSpec& p);

namespace detail {

inline Segment invert_segment(const Segment& s);
inline Segment transpose_segment(const Segment& s);

inline Segment invert_segment(const Segment& s) {
  Segment r = s;
  switch (s.kind) {
    case SegmentKind::ExpGenerator: {
      const int n = static_cast<int>(s.S.rows()) / 2;
      const Mat X = s.rate * J0(n) * s.S;
      const Mat Ainv = s.start.inverse();
      r.kind = SegmentKind::LeftExp;
      r.X = -Ainv * X * s.start;
      r.start = Ainv;
      r.S.resize(0, 0);
      break;
    }
    case SegmentKind::LeftExp: {
      const Mat Ainv = s.start.inverse();
      r.X = -Ainv * s.X * s.start;
      r.start = Ainv;
      break;
    }
    case SegmentKind::Constant:
      r.start = s.start.inverse();
      break;
    case SegmentKind::Sampled: {
      for (auto& m : r.mats) m = m.inverse().eval();
      for (size_t i = 0; i + 1 < r.mats.size(); ++i) {
        const Mat R = r.mats[i].inverse() * r.mats[i + 1];
        r.logs[i] = R.log();
      }
      break;
    }
    case SegmentKind::DirectSumOf:
      r.child_a = std::make_shared<PathSpec>(path_pointwise_inverse(*s.child_a));
      r.child_b = std::make_shared<PathSpec>(path_pointwise_inverse(*s.child_b));
      break;
    case SegmentKind::ConjugationOf:
      r.child_a = std::make_shared<PathSpec>(path_pointwise_inverse(*s.child_a));
      break;
    case SegmentKind::Reversed:
      r.child_a = std::make_shared<PathSpec>(path_pointwise_inverse(*s.child_a));
      break;
  }
  return r;
}

inline Segment transpose_segment(const Segment& s) {
  Segment r = s;
  switch (s.kind) {
    case SegmentKind::ExpGenerator: {
      const int n = static_cast<int>(s.S.rows()) / 2;
      const Mat X = s.rate * J0(n) * s.S;
      const Mat At = s.start.transpose();
      r.kind = SegmentKind::LeftExp;
      r.X = At * X.transpose() * At.inverse();
      r.start = At;
      r.S.resize(0, 0);
      break;
    }
    case SegmentKind::LeftExp: {
      const Mat At = s.start.transpose();
      r.X = At * s.X.transpose() * At.inverse();
      r.start = At;
      break;
    }
    case SegmentKind::Constant:
      r.start = s.start.transpose();
      break;
    case SegmentKind::Sampled: {
      for (auto& m : r.mats) m = m.transpose().eval();
      for (size_t i = 0; i + 1 < r.mats.size(); ++i) {
        const Mat R = r.mats[i].inverse() * r.mats[i + 1];
        r.logs[i] = R.log();
      }
      break;
    }
    case SegmentKind::DirectSumOf:
      r.child_a = std::make_shared<PathSpec>(path_transpose(*s.child_a));
      r.child_b = std::make_shared<PathSpec>(path_transpose(*s.child_b));
      break;
    case SegmentKind::ConjugationOf:
      r.child_a = std::make_shared<PathSpec>(path_transpose(*s.child_a));
      r.child_b = std::make_shared<PathSpec>(
          path_pointwise_inverse(path_transpose(*s.child_b)));
      break;
    case SegmentKind::Reversed:
      r.child_a = std::make_shared<PathSpec>(path_transpose(*s.child_a));
      break;
  }
  return r;
}

}  // namespace detail

inline PathSpec path_pointwise_inverse(const PathSpec& p) {
  PathSpec r = p;
  for (auto& s : r.segments) s = detail::invert_segment(s);
  return r;
}

inline PathSpec path_transpose(const PathSpec& p) {
  PathSpec r = p;
  for (auto& s : r.segments) s = detail::transpose_segment(s);
  return r;
}

// Split at an interior time c; both halves keep their original time labels.
inline std::pair<PathSpec, PathSpec> path_split_at(const PathSpec& p, double c) {
  const double eps = 1e-12 * std::max(1.0, p.length());
  if (!(c > p.a + eps && c < p.b - eps))
    throw invalid_input_error("split time must be interior to the domain");
  PathSpec left, right;
  left.n = right.n = p.n;
  left.a = p.a;
  left.b = c;
  right.a = c;
  right.b = p.b;
  for (const auto& s : p.segments) {
    if (s.t1 <= c + eps) {
      left.segments.push_back(s);
      if (std::abs(s.t1 - c) <= eps) left.segments.back().t1 = c;
      continue;
    }
    if (s.t0 >= c - eps) {
      right.segments.push_back(s);
      if (std::abs(s.t0 - c) <= eps) right.segments.back().t0 = c;
      continue;
    }
    // segment straddles c: split it
    const double f = (c - s.t0) / s.length();
    Segment sl = s, sr = s;
    sl.t1 = c;
    sr.t0 = c;
    switch (s.kind) {
      case SegmentKind::ExpGenerator:
        sl.rate = s.rate * f;
        sr.rate = s.rate * (1.0 - f);
        sr.start = segment_value(s, f);
        break;
      case SegmentKind::LeftExp:
        sl.X = f * s.X;
        sr.X = (1.0 - f) * s.X;
        sr.start = segment_value(s, f);
        break;
      case SegmentKind::Constant:
        break;
      case SegmentKind::Sampled: {
        sl.times.clear();
        sl.mats.clear();
        sl.logs.clear();
        sr.times.clear();
        sr.mats.clear();
        sr.logs.clear();
        for (size_t i = 0; i < s.times.size(); ++i) {
          if (s.times[i] < c - eps) {
            sl.times.push_back(s.times[i]);
            sl.mats.push_back(s.mats[i]);
          } else if (s.times[i] > c + eps) {
            sr.times.push_back(s.times[i]);
            sr.mats.push_back(s.mats[i]);
          }
        }
        const Mat vc = segment_value(s, f);
        sl.times.push_back(c);
        sl.mats.push_back(vc);
        sr.times.insert(sr.times.begin(), c);
        sr.mats.insert(sr.mats.begin(), vc);
        auto relog = [](Segment& seg) {
          seg.logs.clear();
          for (size_t i = 0; i + 1 < seg.mats.size(); ++i)
            seg.logs.push_back(Mat(seg.mats[i].inverse() * seg.mats[i + 1]).log());
        };
        relog(sl);
        relog(sr);
        break;
      }
      case SegmentKind::DirectSumOf: {
        const double fa = detail::child_time(*s.child_a, f);
        const double fb = detail::child_time(*s.child_b, f);
        auto [la, ra] = path_split_at(*s.child_a, fa);
        auto [lb, rb] = path_split_at(*s.child_b, fb);
        sl.child_a = std::make_shared<PathSpec>(std::move(la));
        sl.child_b = std::make_shared<PathSpec>(std::move(lb));
        sr.child_a = std::make_shared<PathSpec>(std::move(ra));
        sr.child_b = std::make_shared<PathSpec>(std::move(rb));
        break;
      }
      case SegmentKind::ConjugationOf: {
        const double fa = detail::child_time(*s.child_a, f);
        const double fb = detail::child_time(*s.child_b, f);
        auto [la, ra] = path_split_at(*s.child_a, fa);
        auto [lb, rb] = path_split_at(*s.child_b, fb);
        sl.child_a = std::make_shared<PathSpec>(std::move(la));
        sl.child_b = std::make_shared<PathSpec>(std::move(lb));
        sr.child_a = std::make_shared<PathSpec>(std::move(ra));
        sr.child_b = std::make_shared<PathSpec>(std::move(rb));
        break;
      }
      case SegmentKind::Reversed: {
        const double cc = s.child_a->b - f * (s.child_a->b - s.child_a->a);
        auto [lc, rc] = path_split_at(*s.child_a, cc);
        // the reverse of the right child part comes first
        sl.child_a = std::make_shared<PathSpec>(std::move(rc));
        sr.child_a = std::make_shared<PathSpec>(std::move(lc));
        break;
      }
    }
    left.segments.push_back(std::move(sl));
    right.segments.push_back(std::move(sr));
  }
  return {std::move(left), std::move(right)};
}

// Piecewise-affine time reparameterization: knots_from -> knots_to (both
// strictly increasing, same size, spanning the respective domains).
inline PathSpec path_reparameterize(const PathSpec& p, const std::vector<double>& knots_from,
                                    const std::vector<double>& knots_to) {
  if (knots_from.size() != knots_to.size() || knots_from.size() < 2)
    throw invalid_input_error("reparameterization needs matching knot lists (>= 2)");
  const double eps = 1e-9 * std::max(1.0, p.length());
  if (std::abs(knots_from.front() - p.a) > eps || std::abs(knots_from.back() - p.b) > eps)
    throw invalid_input_error("source knots must span the path domain");
  for (size_t i = 0; i + 1 < knots_from.size(); ++i)
    if (!(knots_from[i + 1] > knots_from[i]) || !(knots_to[i + 1] > knots_to[i]))
      throw invalid_input_error("knots must be strictly increasing");
  // split into pieces at the interior source knots
  std::vector<PathSpec> pieces;
  PathSpec rest = p;
  for (size_t i = 1; i + 1 < knots_from.size(); ++i) {
    auto [l, r] = path_split_at(rest, knots_from[i]);
    pieces.push_back(std::move(l));
    rest = std::move(r);
  }
  pieces.push_back(std::move(rest));
  // relabel each piece onto its target interval and glue
  PathSpec out;
  out.n = p.n;
  out.a = knots_to.front();
  out.b = knots_to.back();
  for (size_t i = 0; i < pieces.size(); ++i) {
    PathSpec piece = path_with_domain(pieces[i], knots_to[i], knots_to[i + 1]);
    out.segments.insert(out.segments.end(), piece.segments.begin(), piece.segments.end());
  }
  return out;
}

// Dense geodesic sampling of t -> p(t) q(t); exact at the nodes.  Sampling is
// refined until every geodesic step is short (and clear of the negative real
// axis), so the result stays in the homotopy class of the true product.
inline PathSpec path_pointwise_product(const PathSpec& p, const PathSpec& q, int samples = 256,
                                       const Tolerances& tol = {}) {
  if (p.n != q.n) throw invalid_input_error("pointwise product: dimension mismatch");
  if (std::abs(p.a - q.a) > 1e-12 || std::abs(p.b - q.b) > 1e-12)
    throw invalid_input_error("pointwise product: domains must coincide");
  std::vector<std::pair<double, Mat>> nodes;
  nodes.reserve(samples + 1);
  for (int i = 0; i <= samples; ++i) {
    const double t = p.a + (p.b - p.a) * static_cast<double>(i) / samples;
    nodes.emplace_back(t, Mat(p.value(t) * q.value(t)));
  }
  const double max_step = 0.35;
  const size_t max_nodes = 16384;
  for (bool changed = true; changed && nodes.size() < max_nodes;) {
    changed = false;
    std::vector<std::pair<double, Mat>> refined;
    refined.reserve(2 * nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i) {
      refined.push_back(nodes[i]);
      if (i + 1 == nodes.size()) break;
      const Mat R = nodes[i].second.inverse() * nodes[i + 1].second;
      bool split = false;
      const Eigen::VectorXcd ev = R.eigenvalues();
      for (int k = 0; k < ev.size() && !split; ++k) {
        const Complex lam = ev(k);
        if (std::abs(lam) < 1e-12 ||
            (lam.real() < 0.0 && std::abs(lam.imag()) <= 1e-6 * std::abs(lam)))
          split = true;
      }
      if (!split && Mat(R.log()).cwiseAbs().maxCoeff() > max_step) split = true;
      if (split) {
        const double tm = 0.5 * (nodes[i].first + nodes[i + 1].first);
        refined.emplace_back(tm, Mat(p.value(tm) * q.value(tm)));
        changed = true;
      }
    }
    nodes = std::move(refined);
  }
  std::vector<double> times;
  std::vector<Mat> mats;
  times.reserve(nodes.size());
  mats.reserve(nodes.size());
  for (auto& [t, m] : nodes) {
    times.push_back(t);
    mats.push_back(std::move(m));
  }
  return path_sampled(times, mats, tol);
}

}  // namespace sympindex
