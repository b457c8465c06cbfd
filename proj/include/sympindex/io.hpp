#pragma once

// Versioned JSON serialization for paths and computation reports.
//
// Path documents carry a schema version, the half-dimension n, the time
// domain, a list of tagged segment records mirroring the in-memory segment
// kinds, and optionally a reference Lagrangian frame.  Matrices serialize
// row-major with explicit dimensions; half-integers serialize as exact
// rationals {"num", "den"}.  Parsing validates shapes, symmetry/Hamiltonian
// structure of generators, symplecticity of every sample, and continuity
// across joints, and reports failures with the JSON location that caused
// them.  Serialization is deterministic: equal inputs give equal bytes.

#include <json.hpp>

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sympindex/axioms.hpp"
#include "sympindex/core.hpp"
#include "sympindex/index.hpp"
#include "sympindex/lagrangian.hpp"
#include "sympindex/path.hpp"
#include "sympindex/tolerances.hpp"

namespace sympindex {

using json = nlohmann::ordered_json;

struct PathDocument {
  std::string version = "1";
  PathSpec path;
  std::optional<Mat> reference_frame;
};

inline constexpr const char* kSchemaVersion = "1";

namespace detail {

[[noreturn]] inline void schema_error(const std::string& where, const std::string& what) {
  throw invalid_input_error(where + ": " + what);
}

inline double number_at(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

inline const json& member(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    schema_error(where, std::string("missing required member \"") + key + "\"");
  return j.at(key);
}

inline double symplectic_defect(const Mat& A) {
  const int n = static_cast<int>(A.rows()) / 2;
  const Mat Om = Omega0mat(n);
  return (A.transpose() * Om * A - Om).cwiseAbs().maxCoeff();
}

inline void require_symplectic_at(const Mat& A, const std::string& where) {
  if (A.rows() != A.cols() || A.rows() % 2 != 0)
    schema_error(where, "symplectic matrices must be square of even dimension");
  const double defect = symplectic_defect(A);
  if (defect > 1e-6 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "matrix is not symplectic (defect " << defect << ")";
    schema_error(where, os.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Matrices: {"rows": r, "cols": c, "data": [row-major]}.  Parsing also
// accepts the nested-array form [[a, b], [c, d]].
// ---------------------------------------------------------------------------

inline json matrix_to_json(const Mat& A) {
  json j;
  j["rows"] = A.rows();
  j["cols"] = A.cols();
  json data = json::array();
  for (Eigen::Index r = 0; r < A.rows(); ++r)
    for (Eigen::Index c = 0; c < A.cols(); ++c) data.push_back(A(r, c));
  j["data"] = std::move(data);
  return j;
}

inline Mat matrix_from_json(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.empty() || !j.front().is_array() || j.front().empty())
      detail::schema_error(where, "nested-array matrix needs at least one non-empty row");
    const size_t rows = j.size(), cols = j.front().size();
    Mat A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t r = 0; r < rows; ++r) {
      if (!j[r].is_array() || j[r].size() != cols)
        detail::schema_error(where, "matrix rows must be arrays of equal length");
      for (size_t c = 0; c < cols; ++c)
        A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            detail::number_at(j[r][c], where);
    }
    return A;
  }
  if (!j.is_object())
    detail::schema_error(where, "expected a matrix (rows/cols/data object or nested arrays)");
  const auto rows = detail::member(j, "rows", where), cols = detail::member(j, "cols", where);
  if (!rows.is_number_integer() || !cols.is_number_integer() || rows.get<long long>() < 1 ||
      cols.get<long long>() < 1)
    detail::schema_error(where, "rows/cols must be positive integers");
  const Eigen::Index r = rows.get<Eigen::Index>(), c = cols.get<Eigen::Index>();
  const json& data = detail::member(j, "data", where);
  if (!data.is_array() || data.size() != static_cast<size_t>(r * c))
    detail::schema_error(where, "data must be a row-major array of rows*cols numbers");
  Mat A(r, c);
  size_t k = 0;
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index jj = 0; jj < c; ++jj) A(i, jj) = detail::number_at(data[k++], where);
  return A;
}

// ---------------------------------------------------------------------------
// Half-integers as exact rationals.
// ---------------------------------------------------------------------------

inline json half_int_to_json(HalfInt h) {
  json j;
  j["num"] = h.num();
  j["den"] = h.den();
  return j;
}

inline HalfInt half_int_from_json(const json& j, const std::string& where) {
  const auto& num = detail::member(j, "num", where);
  const auto& den = detail::member(j, "den", where);
  if (!num.is_number_integer() || !den.is_number_integer())
    detail::schema_error(where, "num/den must be integers");
  const long long d = den.get<long long>();
  if (d != 1 && d != 2) detail::schema_error(where, "den must be 1 or 2");
  return HalfInt(d == 1 ? 2 * num.get<long long>() : num.get<long long>());
}

inline json tolerances_to_json(const Tolerances& t) {
  json j;
  j["symplectic"] = t.symplectic;
  j["cluster"] = t.cluster;
  j["circle"] = t.circle;
  j["rank_rel"] = t.rank_rel;
  j["join"] = t.join;
  j["round"] = t.round;
  j["herm"] = t.herm;
  j["deriv"] = t.deriv;
  j["time"] = t.time;
  j["crossing"] = t.crossing;
  j["kernel_cut"] = t.kernel_cut;
  j["merge"] = t.merge;
  j["form_zero"] = t.form_zero;
  j["grid"] = t.grid;
  j["max_depth"] = t.max_depth;
  return j;
}

// ---------------------------------------------------------------------------
// Paths -> JSON
// ---------------------------------------------------------------------------

inline json path_to_json(const PathSpec& p);

namespace detail {

inline json segment_to_json(const Segment& s) {
  json j;
  switch (s.kind) {
    case SegmentKind::ExpGenerator:
      j["kind"] = "exp";
      j["interval"] = {s.t0, s.t1};
      j["S"] = matrix_to_json(s.S);
      j["rate"] = s.rate;
      j["start"] = matrix_to_json(s.start);
      break;
    case SegmentKind::LeftExp:
      j["kind"] = "left-exp";
      j["interval"] = {s.t0, s.t1};
      j["X"] = matrix_to_json(s.X);
      j["start"] = matrix_to_json(s.start);
      break;
    case SegmentKind::Constant:
      j["kind"] = "constant";
      j["interval"] = {s.t0, s.t1};
      j["value"] = matrix_to_json(s.start);
      break;
    case SegmentKind::Sampled: {
      j["kind"] = "sampled";
      j["interval"] = {s.t0, s.t1};
      j["times"] = s.times;
      json vals = json::array();
      for (const auto& m : s.mats) vals.push_back(matrix_to_json(m));
      j["values"] = std::move(vals);
      break;
    }
    case SegmentKind::DirectSumOf:
      j["kind"] = "direct-sum";
      j["interval"] = {s.t0, s.t1};
      j["first"] = path_to_json(*s.child_a);
      j["second"] = path_to_json(*s.child_b);
      break;
    case SegmentKind::ConjugationOf:
      j["kind"] = "conjugation";
      j["interval"] = {s.t0, s.t1};
      j["base"] = path_to_json(*s.child_a);
      j["by"] = path_to_json(*s.child_b);
      break;
    case SegmentKind::Reversed:
      j["kind"] = "reversed";
      j["interval"] = {s.t0, s.t1};
      j["base"] = path_to_json(*s.child_a);
      break;
  }
  return j;
}

}  // namespace detail

inline json path_to_json(const PathSpec& p) {
  json j;
  j["n"] = p.n;
  j["domain"] = {p.a, p.b};
  json segs = json::array();
  for (const auto& s : p.segments) segs.push_back(detail::segment_to_json(s));
  j["segments"] = std::move(segs);
  return j;
}

inline json path_document_to_json(const PathDocument& d) {
  json j;
  j["version"] = d.version;
  json body = path_to_json(d.path);
  for (auto& [key, value] : body.items()) j[key] = value;
  if (d.reference_frame) j["reference_frame"] = matrix_to_json(*d.reference_frame);
  return j;
}

inline std::string serialize_path_document(const PathDocument& d) { return path_document_to_json(d).dump(2) + "\n"; }

inline std::string serialize_path(const PathSpec& p) {
  PathDocument d;
  d.path = p;
  return serialize_path_document(d);
}

// ---------------------------------------------------------------------------
// JSON -> paths, with validation
// ---------------------------------------------------------------------------

inline PathSpec path_from_json(const json& j, const std::string& where, const Tolerances& tol);

namespace detail {

inline std::pair<double, double> interval_from_json(const json& rec, const std::string& where) {
  const json& iv = member(rec, "interval", where);
  if (!iv.is_array() || iv.size() != 2)
    schema_error(where + ".interval", "expected [t0, t1]");
  const double t0 = number_at(iv[0], where + ".interval");
  const double t1 = number_at(iv[1], where + ".interval");
  if (!(t1 > t0)) schema_error(where + ".interval", "t1 must exceed t0");
  return {t0, t1};
}

inline Mat square_matrix_from_json(const json& rec, const char* key, int dim,
                                   const std::string& where) {
  const Mat A = matrix_from_json(member(rec, key, where), where + "." + key);
  if (A.rows() != dim || A.cols() != dim) {
    std::ostringstream os;
    os << "expected a " << dim << "x" << dim << " matrix, got " << A.rows() << "x" << A.cols();
    schema_error(where + "." + key, os.str());
  }
  return A;
}

inline Segment segment_from_json(const json& rec, const std::string& where, int n,
                                 const Tolerances& tol) {
  if (!rec.is_object()) schema_error(where, "segment records must be objects");
  const std::string kind = member(rec, "kind", where).is_string()
                               ? rec.at("kind").get<std::string>()
                               : (schema_error(where + ".kind", "expected a string"), "");
  const auto [t0, t1] = interval_from_json(rec, where);
  const int dim = 2 * n;

  Segment seg;
  seg.t0 = t0;
  seg.t1 = t1;

  if (kind == "exp") {
    seg.kind = SegmentKind::ExpGenerator;
    seg.S = square_matrix_from_json(rec, "S", dim, where);
    const double scale = std::max(1.0, seg.S.cwiseAbs().maxCoeff());
    const double asym = (seg.S - seg.S.transpose()).cwiseAbs().maxCoeff();
    if (asym > std::max(1e-8, 10.0 * tol.herm) * scale) {
      std::ostringstream os;
      os << "generator matrix must be symmetric (residual " << asym << ")";
      schema_error(where + ".S", os.str());
    }
    seg.S = 0.5 * (seg.S + seg.S.transpose());
    seg.rate = rec.contains("rate") ? number_at(rec.at("rate"), where + ".rate") : 1.0;
    seg.start = rec.contains("start") ? square_matrix_from_json(rec, "start", dim, where)
                                      : Mat::Identity(dim, dim);
    require_symplectic_at(seg.start, where + ".start");
  } else if (kind == "left-exp") {
    seg.kind = SegmentKind::LeftExp;
    seg.X = square_matrix_from_json(rec, "X", dim, where);
    const Mat Om = Omega0mat(n);
    const double defect = (seg.X.transpose() * Om + Om * seg.X).cwiseAbs().maxCoeff();
    if (defect > std::max(1e-8, 10.0 * tol.herm) * std::max(1.0, seg.X.cwiseAbs().maxCoeff())) {
      std::ostringstream os;
      os << "generator must be Hamiltonian: X^T Omega + Omega X has residual " << defect;
      schema_error(where + ".X", os.str());
    }
    seg.start = rec.contains("start") ? square_matrix_from_json(rec, "start", dim, where)
                                      : Mat::Identity(dim, dim);
    require_symplectic_at(seg.start, where + ".start");
  } else if (kind == "constant") {
    seg.kind = SegmentKind::Constant;
    seg.start = square_matrix_from_json(rec, "value", dim, where);
    require_symplectic_at(seg.start, where + ".value");
  } else if (kind == "sampled") {
    const json& jt = member(rec, "times", where);
    const json& jv = member(rec, "values", where);
    if (!jt.is_array() || jt.size() < 2)
      schema_error(where + ".times", "expected at least two sample times");
    if (!jv.is_array() || jv.size() != jt.size())
      schema_error(where + ".values", "expected one matrix per sample time");
    std::vector<double> times;
    std::vector<Mat> mats;
    for (size_t k = 0; k < jt.size(); ++k) {
      times.push_back(number_at(jt[k], where + ".times"));
      std::ostringstream wk;
      wk << where << ".values[" << k << "]";
      Mat A = matrix_from_json(jv[k], wk.str());
      if (A.rows() != dim || A.cols() != dim)
        schema_error(wk.str(), "sample dimension does not match the declared n");
      require_symplectic_at(A, wk.str());
      mats.push_back(std::move(A));
    }
    const double eps = 1e-9 * std::max(1.0, t1 - t0);
    if (std::abs(times.front() - t0) > eps || std::abs(times.back() - t1) > eps)
      schema_error(where + ".times", "sample times must span the segment interval");
    try {
      PathSpec sp = path_sampled(times, mats, tol);
      seg = std::move(sp.segments.front());
    } catch (const invalid_input_error& e) {
      schema_error(where, e.what());
    }
  } else if (kind == "direct-sum") {
    seg.kind = SegmentKind::DirectSumOf;
    PathSpec a = path_from_json(member(rec, "first", where), where + ".first", tol);
    PathSpec b = path_from_json(member(rec, "second", where), where + ".second", tol);
    if (a.n + b.n != n) {
      std::ostringstream os;
      os << "summand half-dimensions " << a.n << " + " << b.n
         << " do not add up to the declared n = " << n;
      schema_error(where, os.str());
    }
    seg.child_a = std::make_shared<PathSpec>(std::move(a));
    seg.child_b = std::make_shared<PathSpec>(std::move(b));
  } else if (kind == "conjugation") {
    seg.kind = SegmentKind::ConjugationOf;
    PathSpec a = path_from_json(member(rec, "base", where), where + ".base", tol);
    PathSpec b = path_from_json(member(rec, "by", where), where + ".by", tol);
    if (a.n != n || b.n != n)
      schema_error(where, "conjugation children must share the declared n");
    seg.child_a = std::make_shared<PathSpec>(std::move(a));
    seg.child_b = std::make_shared<PathSpec>(std::move(b));
  } else if (kind == "reversed") {
    seg.kind = SegmentKind::Reversed;
    PathSpec a = path_from_json(member(rec, "base", where), where + ".base", tol);
    if (a.n != n) schema_error(where, "reversed child must share the declared n");
    seg.child_a = std::make_shared<PathSpec>(std::move(a));
  } else {
    schema_error(where + ".kind",
                 "unknown kind \"" + kind +
                     "\" (expected exp, left-exp, constant, sampled, direct-sum, "
                     "conjugation, or reversed)");
  }
  return seg;
}

}  // namespace detail

inline PathSpec path_from_json(const json& j, const std::string& where, const Tolerances& tol) {
  if (!j.is_object()) detail::schema_error(where, "expected a path object");
  const json& jn = detail::member(j, "n", where);
  if (!jn.is_number_integer() || jn.get<long long>() < 1 || jn.get<long long>() > 64)
    detail::schema_error(where + ".n", "half-dimension must be an integer in [1, 64]");
  const int n = jn.get<int>();

  const json& jd = detail::member(j, "domain", where);
  if (!jd.is_array() || jd.size() != 2)
    detail::schema_error(where + ".domain", "expected [a, b]");
  const double a = detail::number_at(jd[0], where + ".domain");
  const double b = detail::number_at(jd[1], where + ".domain");
  if (!(b > a)) detail::schema_error(where + ".domain", "b must exceed a");

  const json& js = detail::member(j, "segments", where);
  if (!js.is_array() || js.empty())
    detail::schema_error(where + ".segments", "expected a non-empty array");

  PathSpec p;
  p.n = n;
  p.a = a;
  p.b = b;
  const double eps = 1e-9 * std::max(1.0, b - a);
  for (size_t i = 0; i < js.size(); ++i) {
    std::ostringstream wi;
    wi << where << ".segments[" << i << "]";
    Segment seg = detail::segment_from_json(js[i], wi.str(), n, tol);
    if (i == 0 && std::abs(seg.t0 - a) > eps)
      detail::schema_error(wi.str(), "first segment must start at the domain's left endpoint");
    if (i > 0 && std::abs(seg.t0 - p.segments.back().t1) > eps)
      detail::schema_error(wi.str(), "segment interval does not continue the previous one");
    p.segments.push_back(std::move(seg));
  }
  if (std::abs(p.segments.back().t1 - b) > eps)
    detail::schema_error(where + ".segments", "last segment must end at the domain's right endpoint");

  // continuity across joints, reported with the offending segment index
  for (size_t i = 0; i + 1 < p.segments.size(); ++i) {
    const Mat left = segment_value(p.segments[i], 1.0);
    const Mat right = segment_value(p.segments[i + 1], 0.0);
    const double gap = (left - right).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, left.cwiseAbs().maxCoeff());
    if (gap > 10.0 * tol.join * scale) {
      std::ostringstream os;
      os << where << ".segments[" << (i + 1) << "]: discontinuity at joint t = "
         << p.segments[i].t1 << " (gap norm " << gap << ")";
      throw invalid_input_error(os.str());
    }
  }
  return p;
}

inline PathDocument parse_path_document(const std::string& text, const Tolerances& tol = {}) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw invalid_input_error(std::string("document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) detail::schema_error("$", "expected a JSON object");
  PathDocument d;
  if (j.contains("version")) {
    if (!j.at("version").is_string())
      detail::schema_error("$.version", "expected a string");
    d.version = j.at("version").get<std::string>();
    if (d.version != kSchemaVersion)
      detail::schema_error("$.version", "unsupported schema version \"" + d.version + "\"");
  }
  d.path = path_from_json(j, "$", tol);
  if (j.contains("reference_frame"))
    d.reference_frame = matrix_from_json(j.at("reference_frame"), "$.reference_frame");
  return d;
}

inline PathSpec parse_path(const std::string& text, const Tolerances& tol = {}) {
  return parse_path_document(text, tol).path;
}

// ---------------------------------------------------------------------------
// Report documents
// ---------------------------------------------------------------------------

inline json cz_report_to_json(const CzReport& r) {
  json j;
  j["method"] = circle_map_name(r.map);
  j["index"] = half_int_to_json(HalfInt::from_int(r.index));
  j["winding"] = r.winding;
  return j;
}

inline json rs_report_to_json(const RsReport& r) {
  json j;
  j["method"] = circle_map_name(r.map);
  j["index"] = half_int_to_json(r.index);
  j["winding"] = r.winding;
  j["degree"] = r.degree;
  j["correction_start"] = r.correction_start;
  j["correction_end"] = r.correction_end;
  return j;
}

inline json crossing_to_json(const Crossing& c) {
  json j;
  j["t"] = c.t;
  j["sigma"] = c.sigma;
  j["at_start"] = c.at_start;
  j["at_end"] = c.at_end;
  j["signature"] = {{"positive", c.sig.positive},
                    {"negative", c.sig.negative},
                    {"zero", c.sig.zero}};
  j["regular"] = c.regular;
  return j;
}

inline json rs_crossings_report_to_json(const RsCrossingsReport& r) {
  json j;
  j["method"] = "crossings";
  j["index"] = half_int_to_json(r.index);
  json cs = json::array();
  for (const auto& c : r.crossings) cs.push_back(crossing_to_json(c));
  j["crossings"] = std::move(cs);
  return j;
}

inline json lagrangian_crossing_to_json(const LagrangianCrossing& c) {
  json j;
  j["t"] = c.t;
  j["sigma"] = c.gap;
  j["at_start"] = c.at_start;
  j["at_end"] = c.at_end;
  j["signature"] = {{"positive", c.sig.positive},
                    {"negative", c.sig.negative},
                    {"zero", c.sig.zero}};
  j["regular"] = c.regular;
  return j;
}

inline json lagrangian_report_to_json(const LagrangianReport& r) {
  json j;
  j["index"] = half_int_to_json(r.index);
  j["constant_stratum"] = r.constant_stratum;
  json cs = json::array();
  for (const auto& c : r.crossings) cs.push_back(lagrangian_crossing_to_json(c));
  j["crossings"] = std::move(cs);
  return j;
}

inline json axiom_report_to_json(const AxiomSuiteReport& r) {
  json j;
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["all_passed"] = r.all_passed();
  json checks = json::array();
  for (const auto& c : r.checks) {
    json cj;
    cj["name"] = c.name;
    cj["trials"] = c.trials;
    cj["failures"] = c.failures;
    cj["notes"] = c.notes;
    checks.push_back(std::move(cj));
  }
  j["checks"] = std::move(checks);
  return j;
}

}  // namespace sympindex
