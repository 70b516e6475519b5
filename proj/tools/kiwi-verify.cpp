// Command-line front end: verifies a single program or runs a benchmark
// corpus, prints the verdict with an optional witness, and emits the
// summary report in text or JSON.
//
// Exit codes: 0 safe, 10 unsafe, 2 unknown, 3 resource limit, 64 usage.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kiwi/corpus.hpp"
#include "kiwi/engine.hpp"
#include "kiwi/parser.hpp"

using namespace kiwi;

namespace {

int usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return 64;
}

Mode parse_mode(const std::string& s) {
  if (s == "kiki") return Mode::Kiki;
  if (s == "ibmc") return Mode::Ibmc;
  if (s == "kind") return Mode::Kind;
  if (s == "ai") return Mode::Ai;
  if (s == "portfolio") return Mode::Portfolio;
  throw CLI::ValidationError("--mode", "unknown mode " + s);
}

DomainKind parse_domain(const std::string& s) {
  if (s == "intervals") return DomainKind::Intervals;
  if (s == "zones") return DomainKind::Zones;
  if (s == "octagons") return DomainKind::Octagons;
  throw CLI::ValidationError("--domain", "unknown domain " + s);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_witness(std::ostream& os, const Verdict& v) {
  if (v.kind == Verdict::Kind::Safe) {
    os << "safe k=" << v.k << "\n";
    for (const std::string& l : v.invariant) os << l << "\n";
    return;
  }
  os << "unsafe k=" << v.k << "\n";
  os << "nondet:";
  for (const BvConst& c : v.nondets) os << " " << int128_to_string(c.as_int());
  os << "\n";
  for (const TraceStep& s : v.trace.steps) {
    os << "step " << s.line << ":" << s.col << " " << s.text << "\n";
    for (const auto& [name, val] : s.env)
      os << "  " << name << "=" << int128_to_string(val.as_int()) << "\n";
  }
  os << "violation " << v.trace.fail_line << ":" << v.trace.fail_col << "\n";
}

nlohmann::json verdict_json(const Verdict& v, Mode mode) {
  nlohmann::json j;
  j["verdict"] = verdict_word(v.kind);
  j["mode"] = mode_name(mode);
  j["k"] = v.k;
  j["seconds"] = v.seconds;
  if (v.kind == Verdict::Kind::Safe) j["invariant"] = v.invariant;
  if (v.kind == Verdict::Kind::Unsafe) {
    j["nondets"] = nlohmann::json::array();
    for (const BvConst& c : v.nondets) j["nondets"].push_back(int128_to_string(c.as_int()));
    j["trace"] = nlohmann::json::array();
    for (const TraceStep& s : v.trace.steps)
      j["trace"].push_back({{"line", s.line}, {"col", s.col}, {"text", s.text}});
    j["fail_line"] = v.trace.fail_line;
    j["fail_col"] = v.trace.fail_col;
  }
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.kind == Verdict::Kind::Safe || v.kind == Verdict::Kind::Unsafe)
    j["via"] = mode_name(v.via);
  return j;
}

int exit_code(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Safe: return 0;
    case Verdict::Kind::Unsafe: return 10;
    case Verdict::Kind::Unknown: return 2;
    case Verdict::Kind::ResourceOut: return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bit-precise safety verifier"};
  std::string file, mode_s = "kiki", domain_s = "intervals", infer_s = "binsearch";
  std::string witness_path, dump_cnf_path, solver_s, corpus_dir, report_s = "text";
  int max_k = 50, jobs = 1;
  double timeout = 0;
  bool json_out = false, dump_ssa = false, dump_invariant = false, stats_out = false;
  bool force = false;

  app.add_option("file", file, "program to verify");
  app.add_option("--mode", mode_s, "kiki|ibmc|kind|ai|portfolio");
  app.add_option("--max-k", max_k, "unwinding bound");
  app.add_option("--timeout", timeout, "wall-clock budget in seconds");
  app.add_option("--witness", witness_path, "write the invariant or trace witness here");
  app.add_flag("--json", json_out, "machine-readable verdict on stdout");
  app.add_flag("--dump-ssa", dump_ssa, "print the unwound constraint list and exit");
  app.add_option("--dump-cnf", dump_cnf_path, "write the clause database in DIMACS");
  app.add_option("--solver", solver_s, "external:<cmd> selects a subprocess backend");
  app.add_option("--domain", domain_s, "intervals|zones|octagons");
  app.add_flag("--dump-invariant", dump_invariant, "print invariant rows on a safe verdict");
  app.add_option("--infer", infer_s, "binsearch|enum (enum needs widths <= 8)");
  app.add_flag("--force", force, "lift the width gate on --infer enum");
  app.add_flag("--stats", stats_out, "print solver call counts");
  app.add_option("--corpus", corpus_dir, "run every benchmark in this directory");
  app.add_option("--report", report_s, "text|json corpus report");
  app.add_option("--jobs", jobs, "parallel corpus workers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  }

  try {
    EngineConfig cfg;
    cfg.mode = parse_mode(mode_s);
    cfg.max_k = max_k;
    cfg.timeout = timeout;
    cfg.domain = parse_domain(domain_s);
    if (infer_s == "enum") cfg.infer_enum = true;
    else if (infer_s != "binsearch")
      return usage_error("--infer must be binsearch or enum");
    if (!solver_s.empty()) {
      if (solver_s.rfind("external:", 0) != 0)
        return usage_error("--solver must be external:<cmd>");
      std::string cmd = solver_s.substr(9);
      cfg.backend = [cmd] {
        return std::unique_ptr<sat::ISatBackend>(new sat::ExternalBackend(cmd));
      };
    }
    if (report_s != "text" && report_s != "json")
      return usage_error("--report must be text or json");

    if (!corpus_dir.empty()) {
      Report rep = run_corpus(corpus_dir, {Mode::Ibmc, Mode::Kind, Mode::Ai}, cfg, jobs);
      if (report_s == "json") report_json(std::cout, rep);
      else report_text(std::cout, rep);
      int bad = 0;
      for (Mode m : rep.modes) {
        const ModeCounts& c = rep.counts.at(mode_name(m));
        bad += c.false_proofs + c.false_alarms;
      }
      return bad ? 2 : 0;
    }

    if (file.empty()) return usage_error("no input file");
    Program p = parse_program(read_file(file));

    if (cfg.infer_enum && !force) {
      for (const auto& [name, t] : p.vars)
        if (t.width > 8)
          return usage_error("--infer enum needs widths <= 8 (" + name + " is " +
                             std::to_string(t.width) + " bits); use --force to override");
    }

    if (dump_ssa || !dump_cnf_path.empty()) {
      ExprPool pool;
      BvSolver solver(pool);
      SsaEncoder enc(p, solver);
      enc.encode_round(0);
      if (!dump_cnf_path.empty()) {
        std::ofstream out(dump_cnf_path);
        if (!out) return usage_error("cannot write " + dump_cnf_path);
        solver.dump_cnf(out);
      }
      if (dump_ssa) {
        enc.dump(std::cout);
        return 0;
      }
    }

    InferStats stats;
    cfg.stats = &stats;
    Verdict v = run_verify(p, cfg);

    if (json_out) {
      std::cout << verdict_json(v, cfg.mode).dump(2) << "\n";
    } else {
      switch (v.kind) {
        case Verdict::Kind::Safe: std::cout << "SAFE k=" << v.k << "\n"; break;
        case Verdict::Kind::Unsafe: std::cout << "UNSAFE k=" << v.k << "\n"; break;
        case Verdict::Kind::Unknown:
          std::cout << "UNKNOWN (" << v.reason << ")\n";
          break;
        case Verdict::Kind::ResourceOut:
          std::cout << "RESOURCE-OUT (" << v.reason << ")\n";
          break;
      }
      if (dump_invariant && v.kind == Verdict::Kind::Safe)
        for (const std::string& l : v.invariant) std::cout << l << "\n";
      if (v.kind == Verdict::Kind::Unsafe)
        std::cout << "violation at " << v.trace.fail_line << ":" << v.trace.fail_col
                  << "\n";
    }
    if (stats_out)
      std::cerr << "stats: solver_calls=" << stats.solver_calls
                << " inductive_checks=" << stats.inductive_checks
                << " strengthen_calls=" << stats.strengthen_calls
                << " join_iterations=" << stats.join_iterations
                << " searches=" << stats.searches.size() << "\n";
    if (!witness_path.empty() && v.conclusive()) {
      std::ofstream out(witness_path);
      if (!out) return usage_error("cannot write " + witness_path);
      write_witness(out, v);
    }
    return exit_code(v.kind);
  } catch (const CLI::ValidationError& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
