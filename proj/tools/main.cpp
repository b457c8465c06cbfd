// Command-line interface: parse JSON path documents, compute indices, run the
// property-verification suite, and generate random path corpora.
//
//   cz        integer index of a path from the identity (one or all methods)
//   rs        half-integer index of an arbitrary symplectic path
//   rs-lagr   index of the graph of the path against a reference Lagrangian
//   rs-prime  index of the moving image of a reference Lagrangian
//   rho-eval  sample the chosen circle map along the path
//   verify    run the randomized property suite
//   gen       generate random path documents
//
// Input documents are read from a positional file argument or stdin.  The
// JSON report goes to stdout; a short human summary goes to stderr.  Exit
// codes: 0 success, 1 invalid input, 2 tolerance or regularity failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sympindex/sympindex.hpp"

namespace {

using namespace sympindex;

struct Options {
  std::string input = "-";
  std::string method = "rho";
  std::string format = "json";
  std::optional<double> master_tol;
  std::optional<double> round_tol;
  std::uint64_t seed = 7;
  int trials = 50;
  int samples = 33;
  int gen_n = 0;  // 0: cycle through 1, 2, 3
};

Tolerances resolve_tolerances(const Options& o) {
  Tolerances t;
  if (const char* env = std::getenv("INDEX_TOOLKIT_TOL")) {
    try {
      t = Tolerances::with_master(std::stod(env));
    } catch (const std::exception&) {
      throw invalid_input_error("INDEX_TOOLKIT_TOL is not a number");
    }
  }
  if (o.master_tol) t = Tolerances::with_master(*o.master_tol);
  if (o.round_tol) t.round = *o.round_tol;
  return t;
}

std::string read_input(const std::string& name) {
  if (name == "-")
    return std::string(std::istreambuf_iterator<char>(std::cin),
                       std::istreambuf_iterator<char>());
  std::ifstream in(name);
  if (!in) throw invalid_input_error("cannot open input file: " + name);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<CircleMap> maps_for(const std::string& method) {
  if (method == "all") return {CircleMap::Rho, CircleMap::Polar, CircleMap::Chat};
  if (method == "rho") return {CircleMap::Rho};
  if (method == "polar") return {CircleMap::Polar};
  if (method == "chat") return {CircleMap::Chat};
  throw invalid_input_error("unknown method: " + method);
}

long long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                               t0)
      .count();
}

// Emits the report (stdout) and the summary (stderr) honoring --format.
void emit(const json& report, const std::string& summary, const Options& o) {
  if (o.format == "json")
    std::cout << report.dump(2) << "\n";
  else
    std::cout << summary << "\n";
  std::cerr << summary << "\n";
}

json report_shell(const char* command, const Options& o, const Tolerances& tol) {
  json out;
  out["version"] = kSchemaVersion;
  out["command"] = command;
  out["tolerances"] = tolerances_to_json(tol);
  (void)o;
  return out;
}

int run_cz(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const PathDocument doc = parse_path_document(read_input(o.input), tol);
  json out = report_shell("cz", o, tol);
  out["input"] = path_document_to_json(doc);
  json results = json::array();
  std::ostringstream summary;
  summary << "cz:";
  for (CircleMap map : maps_for(o.method)) {
    const CzReport r = conley_zehnder_report(doc.path, map, tol);
    results.push_back(cz_report_to_json(r));
    summary << " index " << r.index << " [" << circle_map_name(map) << "]";
  }
  out["results"] = std::move(results);
  out["wall_time_ms"] = elapsed_ms(t0);
  emit(out, summary.str(), o);
  return 0;
}

int run_rs(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const PathDocument doc = parse_path_document(read_input(o.input), tol);
  json out = report_shell("rs", o, tol);
  out["input"] = path_document_to_json(doc);
  json results = json::array();
  std::ostringstream summary;
  summary << "rs:";
  for (CircleMap map : maps_for(o.method)) {
    const RsReport r = robbin_salamon_report(doc.path, map, tol);
    results.push_back(rs_report_to_json(r));
    summary << " index " << r.index.str() << " [" << circle_map_name(map) << "]";
  }
  out["results"] = std::move(results);
  out["wall_time_ms"] = elapsed_ms(t0);
  emit(out, summary.str(), o);
  return 0;
}

int run_rs_lagr(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const PathDocument doc = parse_path_document(read_input(o.input), tol);
  std::optional<Lagrangian> ref;
  if (doc.reference_frame) {
    if (doc.reference_frame->rows() != 4 * doc.path.n ||
        doc.reference_frame->cols() != 2 * doc.path.n)
      throw invalid_input_error(
          "reference_frame for rs-lagr must be (4n) x (2n): a Lagrangian frame in the "
          "graph space");
    ref = Lagrangian{*doc.reference_frame};
  }
  const LagrangianReport r = rs_graph_report(doc.path, tol, ref);
  json out = report_shell("rs-lagr", o, tol);
  out["input"] = path_document_to_json(doc);
  out["result"] = lagrangian_report_to_json(r);
  out["wall_time_ms"] = elapsed_ms(t0);
  std::ostringstream summary;
  summary << "rs-lagr: index " << r.index.str() << " (" << r.crossings.size() << " crossings)";
  emit(out, summary.str(), o);
  return 0;
}

int run_rs_prime(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const PathDocument doc = parse_path_document(read_input(o.input), tol);
  std::optional<Lagrangian> ref;
  if (doc.reference_frame) {
    if (doc.reference_frame->rows() != 2 * doc.path.n ||
        doc.reference_frame->cols() != doc.path.n)
      throw invalid_input_error(
          "reference_frame for rs-prime must be (2n) x n: a Lagrangian frame in the "
          "phase space");
    ref = Lagrangian{*doc.reference_frame};
  }
  const LagrangianReport r = rs_prime_report(doc.path, tol, ref);
  json out = report_shell("rs-prime", o, tol);
  out["input"] = path_document_to_json(doc);
  out["result"] = lagrangian_report_to_json(r);
  out["wall_time_ms"] = elapsed_ms(t0);
  std::ostringstream summary;
  summary << "rs-prime: index " << r.index.str() << " (" << r.crossings.size()
          << " crossings)";
  emit(out, summary.str(), o);
  return 0;
}

int run_rho_eval(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const PathDocument doc = parse_path_document(read_input(o.input), tol);
  if (o.samples < 2) throw invalid_input_error("--samples must be at least 2");
  json out = report_shell("rho-eval", o, tol);
  out["input"] = path_document_to_json(doc);
  json results = json::array();
  for (CircleMap map : maps_for(o.method)) {
    json entry;
    entry["method"] = circle_map_name(map);
    json values = json::array();
    for (int i = 0; i < o.samples; ++i) {
      const double t =
          doc.path.a + (doc.path.b - doc.path.a) * static_cast<double>(i) / (o.samples - 1);
      const Complex z = circle_map_value(doc.path.value(t), map, tol);
      values.push_back(json{{"t", t}, {"re", z.real()}, {"im", z.imag()}});
    }
    entry["values"] = std::move(values);
    results.push_back(std::move(entry));
  }
  out["results"] = std::move(results);
  out["wall_time_ms"] = elapsed_ms(t0);
  std::ostringstream summary;
  summary << "rho-eval: " << o.samples << " samples on [" << doc.path.a << ", " << doc.path.b
          << "]";
  emit(out, summary.str(), o);
  return 0;
}

int run_verify(const Options& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const Tolerances tol = resolve_tolerances(o);
  const AxiomSuiteReport r = verify_axioms(o.seed, o.trials, tol);
  json out = report_shell("verify", o, tol);
  out["options"] = {{"seed", o.seed}, {"trials", o.trials}};
  out["result"] = axiom_report_to_json(r);
  out["wall_time_ms"] = elapsed_ms(t0);
  std::ostringstream summary;
  for (const auto& c : r.checks)
    summary << (c.passed() ? "[pass] " : "[FAIL] ") << c.name << ": " << c.trials << " trials, "
            << c.failures << " failures\n";
  summary << (r.all_passed() ? "verify: all checks passed" : "verify: FAILURES DETECTED");
  emit(out, summary.str(), o);
  return r.all_passed() ? 0 : 2;
}

int run_gen(const Options& o) {
  const Tolerances tol = resolve_tolerances(o);
  (void)tol;
  if (o.trials < 1) throw invalid_input_error("--trials must be positive");
  std::mt19937_64 rng(o.seed);
  std::vector<PathDocument> docs;
  for (int i = 0; i < o.trials; ++i) {
    const int n = (o.gen_n > 0) ? o.gen_n : 1 + i % 3;
    PathDocument d;
    d.path = random_generator_path(rng, n, 1, 4);
    docs.push_back(std::move(d));
  }
  std::ostringstream summary;
  if (docs.size() == 1) {
    std::cout << serialize_path_document(docs.front());
    summary << "gen: wrote 1 path document (seed " << o.seed << ")";
  } else {
    json out;
    out["version"] = kSchemaVersion;
    json paths = json::array();
    for (const auto& d : docs) paths.push_back(path_document_to_json(d));
    out["paths"] = std::move(paths);
    std::cout << out.dump(2) << "\n";
    summary << "gen: wrote " << docs.size() << " path documents (seed " << o.seed << ")";
  }
  std::cerr << summary.str() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symplectic path index toolkit"};
  app.require_subcommand(1);
  Options o;

  const auto add_io = [&](CLI::App* sub) {
    sub->add_option("input", o.input, "input path document (file, or - for stdin)");
    sub->add_option("--tol", o.master_tol, "master tolerance knob");
    sub->add_option("--round-tol", o.round_tol, "index rounding tolerance");
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
  };
  const auto add_method = [&](CLI::App* sub) {
    sub->add_option("--method", o.method, "circle map to use")
        ->check(CLI::IsMember({"rho", "polar", "chat", "all"}));
  };

  CLI::App* cz = app.add_subcommand("cz", "integer index of a path from the identity");
  add_io(cz);
  add_method(cz);

  CLI::App* rs = app.add_subcommand("rs", "half-integer index of a symplectic path");
  add_io(rs);
  add_method(rs);

  CLI::App* rs_lagr =
      app.add_subcommand("rs-lagr", "index of the graph against a reference Lagrangian");
  add_io(rs_lagr);

  CLI::App* rs_prime =
      app.add_subcommand("rs-prime", "index of the moving image of a reference Lagrangian");
  add_io(rs_prime);

  CLI::App* rho_eval = app.add_subcommand("rho-eval", "sample the circle map along the path");
  add_io(rho_eval);
  add_method(rho_eval);
  rho_eval->add_option("--samples", o.samples, "number of sample times");

  CLI::App* verify = app.add_subcommand("verify", "run the randomized property suite");
  verify->add_option("--seed", o.seed, "random seed");
  verify->add_option("--trials", o.trials, "trial count scale");
  verify->add_option("--tol", o.master_tol, "master tolerance knob");
  verify->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "text"}));

  CLI::App* gen = app.add_subcommand("gen", "generate random path documents");
  gen->add_option("--seed", o.seed, "random seed");
  gen->add_option("--trials", o.trials, "number of documents");
  gen->add_option("--n", o.gen_n, "half-dimension (0: cycle 1..3)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cz->parsed()) return run_cz(o);
    if (rs->parsed()) return run_rs(o);
    if (rs_lagr->parsed()) return run_rs_lagr(o);
    if (rs_prime->parsed()) return run_rs_prime(o);
    if (rho_eval->parsed()) return run_rho_eval(o);
    if (verify->parsed()) return run_verify(o);
    if (gen->parsed()) return run_gen(o);
  } catch (const invalid_input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const tolerance_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
