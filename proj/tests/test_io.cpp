// Serialization contract: path documents round-trip bit-exactly through
// parse/serialize, parsing validates structure (shapes, symmetry, symplectic
// samples, joint continuity) with location-bearing errors, half-integers
// travel as exact rationals, and report serialization is deterministic.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <string>

#include "sympindex/fixtures.hpp"
#include "sympindex/io.hpp"
#include "sympindex/random.hpp"

using namespace sympindex;

namespace {

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

template <typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const invalid_input_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("a bare exponential document evaluates as written") {
  const std::string doc = R"({
    "version": "1",
    "n": 1,
    "domain": [0.0, 1.0],
    "segments": [
      {"kind": "exp", "interval": [0.0, 1.0],
       "S": [[3.141592653589793, 0.0], [0.0, 3.141592653589793]]}
    ]
  })";
  const PathSpec p = parse_path(doc);
  REQUIRE(p.n == 1);
  const Mat end = p.end_value();
  REQUIRE((end + Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("documents round-trip bit-exactly through parse and serialize") {
  std::mt19937_64 rng(2024u);

  // one path exercising every segment kind, nested two levels deep
  PathSpec exp_leg = path_from_generator(random_symmetric(rng, 4), 1.0, 0.0, 0.25);
  PathSpec left = path_left_exp(Mat(J0(2) * random_symmetric(rng, 4, 0.5)),
                                exp_leg.end_value(), 0.25, 0.5);
  PathSpec cons = path_constant(left.end_value(), 0.5, 0.75);
  std::vector<double> ts;
  std::vector<Mat> ms;
  PathSpec tail = path_from_generator(random_symmetric(rng, 4, 0.6), 1.0, 0.0, 1.0,
                                      cons.end_value());
  for (int i = 0; i <= 16; ++i) {
    const double t = i / 16.0;
    ts.push_back(0.75 + 0.25 * t);
    ms.push_back(tail.value(t));
  }
  PathSpec sampled = path_sampled(ts, ms);
  PathSpec zoo = path_catenate({exp_leg, left, cons, sampled});
  zoo = path_conjugate_const(zoo, random_symplectic(rng, 2, 2, 0.3));
  zoo = path_direct_sum(zoo, path_reverse(random_generator_path(rng, 1, 1, 2)));

  const std::string once = serialize_path(zoo);
  const PathSpec back = parse_path(once);
  const std::string twice = serialize_path(back);
  REQUIRE(once == twice);

  // parsed and original paths agree pointwise
  for (int i = 0; i <= 10; ++i) {
    const double t = i / 10.0;
    REQUIRE((back.value(t) - zoo.value(t)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("sampled documents reproduce the sampled rotation") {
  std::vector<double> ts;
  std::vector<Mat> ms;
  for (int i = 0; i <= 64; ++i) {
    const double t = i / 64.0;
    ts.push_back(t);
    Mat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    ms.push_back(R);
  }
  const std::string doc = serialize_path(path_sampled(ts, ms));
  const PathSpec p = parse_path(doc);
  for (int i = 0; i <= 40; ++i) {
    const double t = i / 40.0;
    Mat R(2, 2);
    R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    REQUIRE((p.value(t) - R).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("schema violations carry the offending location") {
  const std::string base = R"({"n": 1, "domain": [0, 1], "segments": [
    {"kind": "exp", "interval": [0, 1], "S": [[1, 0], [0, 1]]}]})";
  REQUIRE_NOTHROW(parse_path(base));

  SECTION("not JSON at all") {
    REQUIRE(contains(message_of([] { parse_path("{nope"); }), "not valid JSON"));
  }
  SECTION("missing member") {
    const auto msg = message_of([] { parse_path(R"({"n": 1, "segments": []})"); });
    REQUIRE(contains(msg, "domain"));
  }
  SECTION("unknown kind") {
    const auto msg = message_of([] {
      parse_path(R"({"n": 1, "domain": [0, 1], "segments": [
        {"kind": "spline", "interval": [0, 1]}]})");
    });
    REQUIRE(contains(msg, "segments[0].kind"));
    REQUIRE(contains(msg, "spline"));
  }
  SECTION("asymmetric generator") {
    const auto msg = message_of([] {
      parse_path(R"({"n": 1, "domain": [0, 1], "segments": [
        {"kind": "exp", "interval": [0, 1], "S": [[0, 1], [0, 0]]}]})");
    });
    REQUIRE(contains(msg, "segments[0].S"));
    REQUIRE(contains(msg, "symmetric"));
  }
  SECTION("non-symplectic sample") {
    const auto msg = message_of([] {
      parse_path(R"({"n": 1, "domain": [0, 1], "segments": [
        {"kind": "constant", "interval": [0, 1], "value": [[2, 0], [0, 2]]}]})");
    });
    REQUIRE(contains(msg, "segments[0].value"));
    REQUIRE(contains(msg, "not symplectic"));
  }
  SECTION("matrix shape mismatch") {
    const auto msg = message_of([] {
      parse_path(R"({"n": 2, "domain": [0, 1], "segments": [
        {"kind": "exp", "interval": [0, 1], "S": [[1, 0], [0, 1]]}]})");
    });
    REQUIRE(contains(msg, "segments[0].S"));
    REQUIRE(contains(msg, "4x4"));
  }
  SECTION("unsupported version") {
    const auto msg = message_of([&] {
      parse_path_document(R"({"version": "7", "n": 1, "domain": [0, 1], "segments": [
        {"kind": "exp", "interval": [0, 1], "S": [[1, 0], [0, 1]]}]})");
    });
    REQUIRE(contains(msg, "version"));
  }
}

TEST_CASE("a catenation with a mismatched joint names the second segment") {
  // segment 1 ends at exp(J0 S) != Id, segment 2 starts at Id
  const std::string doc = R"({"n": 1, "domain": [0, 2], "segments": [
    {"kind": "exp", "interval": [0, 1], "S": [[1, 0], [0, 1]]},
    {"kind": "exp", "interval": [1, 2], "S": [[1, 0], [0, 1]]}]})";
  const auto msg = message_of([&] { parse_path(doc); });
  REQUIRE(contains(msg, "segments[1]"));
  REQUIRE(contains(msg, "discontinuity"));
  REQUIRE(contains(msg, "gap norm"));
}

TEST_CASE("interval tiling is enforced") {
  const std::string doc = R"({"n": 1, "domain": [0, 1], "segments": [
    {"kind": "constant", "interval": [0, 0.4], "value": [[1, 0], [0, 1]]},
    {"kind": "constant", "interval": [0.6, 1], "value": [[1, 0], [0, 1]]}]})";
  const auto msg = message_of([&] { parse_path(doc); });
  REQUIRE(contains(msg, "segments[1]"));
  REQUIRE(contains(msg, "continue"));
}

TEST_CASE("half-integers travel as exact rationals") {
  REQUIRE(half_int_to_json(HalfInt(1)) == json({{"num", 1}, {"den", 2}}));
  REQUIRE(half_int_to_json(HalfInt::from_int(-3)) == json({{"num", -3}, {"den", 1}}));
  REQUIRE(half_int_from_json(json{{"num", 5}, {"den", 2}}, "$") == HalfInt(5));
  REQUIRE(half_int_from_json(json{{"num", 5}, {"den", 1}}, "$") == HalfInt(10));
  REQUIRE_THROWS_AS(half_int_from_json(json{{"num", 1}, {"den", 3}}, "$"),
                    invalid_input_error);
  REQUIRE_THROWS_AS(half_int_from_json(json{{"num", 0.5}, {"den", 2}}, "$"),
                    invalid_input_error);
}

TEST_CASE("matrices accept both encodings and reject malformed ones") {
  Mat A(2, 3);
  A << 1, 2, 3, 4, 5, 6;
  const json j = matrix_to_json(A);
  REQUIRE(j["rows"] == 2);
  REQUIRE(j["cols"] == 3);
  REQUIRE((matrix_from_json(j, "$") - A).cwiseAbs().maxCoeff() == 0.0);
  const json nested = json::parse("[[1, 2, 3], [4, 5, 6]]");
  REQUIRE((matrix_from_json(nested, "$") - A).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(matrix_from_json(json::parse("[[1, 2], [3]]"), "$"),
                    invalid_input_error);
  REQUIRE_THROWS_AS(matrix_from_json(json::parse("\"mat\""), "$"), invalid_input_error);
  REQUIRE_THROWS_AS(
      matrix_from_json(json({{"rows", 2}, {"cols", 2}, {"data", {1, 2, 3}}}), "$"),
      invalid_input_error);
}

TEST_CASE("reference frames ride along with the document") {
  PathDocument d;
  d.path = loop_phi(1, 1);
  Mat frame(4, 2);
  frame << 1, 0, 0, 1, 1, 0, 0, 1;
  d.reference_frame = frame;
  const std::string text = serialize_path_document(d);
  const PathDocument back = parse_path_document(text);
  REQUIRE(back.reference_frame.has_value());
  REQUIRE((*back.reference_frame - frame).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(serialize_path_document(back) == text);
}

TEST_CASE("report serialization is deterministic and carries exact values") {
  const PathSpec p = path_from_generator(Mat(M_PI * Mat::Identity(2, 2)));
  const auto all = conley_zehnder_all(p);
  REQUIRE(all.size() == 3);
  for (const auto& r : all) {
    const json j = cz_report_to_json(r);
    REQUIRE(j["index"] == json({{"num", 1}, {"den", 1}}));
  }

  const RsReport rs = robbin_salamon_report(shear_linear(Mat::Zero(1, 1), -Mat::Ones(1, 1)));
  const json jr = rs_report_to_json(rs);
  REQUIRE(jr["index"] == json({{"num", 1}, {"den", 2}}));

  const json t1 = tolerances_to_json(Tolerances{});
  const json t2 = tolerances_to_json(Tolerances{});
  REQUIRE(t1.dump() == t2.dump());

  const json a1 = axiom_report_to_json(verify_axioms(5u, 2));
  const json a2 = axiom_report_to_json(verify_axioms(5u, 2));
  REQUIRE(a1.dump() == a2.dump());
  REQUIRE(a1["all_passed"] == true);
}
