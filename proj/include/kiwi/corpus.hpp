/*
 * Benchmark corpus runner: expected-verdict manifest, parallel execution
 * over (benchmark, mode) pairs, and the summary report.
 *
 * Manifest format, one entry per line:
 *   path,expected,notes
 * where expected is safe or unsafe, optionally with the depth the verdict
 * is reached at, e.g. unsafe@3. Blank lines and # comments are skipped.
 */
#pragma once

#include <atomic>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "kiwi/engine.hpp"
#include "kiwi/parser.hpp"

namespace kiwi {

struct CorpusEntry {
  std::string path;
  Verdict::Kind expected = Verdict::Kind::Unknown;  // Safe or Unsafe
  int expected_k = -1;                              // -1 when not recorded
  std::string notes;
};

inline std::vector<CorpusEntry> load_manifest(const std::string& dir) {
  std::ifstream in(dir + "/manifest");
  if (!in) throw std::runtime_error("missing manifest in " + dir);
  std::vector<CorpusEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    size_t c1 = line.find(',');
    size_t c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": expected path,expected,notes");
    CorpusEntry e;
    e.path = dir + "/" + line.substr(0, c1);
    std::string verdict = line.substr(c1 + 1, c2 - c1 - 1);
    e.notes = line.substr(c2 + 1);
    if (size_t at = verdict.find('@'); at != std::string::npos) {
      e.expected_k = std::stoi(verdict.substr(at + 1));
      verdict = verdict.substr(0, at);
    }
    if (verdict == "safe") e.expected = Verdict::Kind::Safe;
    else if (verdict == "unsafe") e.expected = Verdict::Kind::Unsafe;
    else
      throw std::runtime_error("manifest line " + std::to_string(lineno) +
                               ": verdict must be safe or unsafe");
    out.push_back(std::move(e));
  }
  return out;
}

/// One row of the comparison table.
struct ModeCounts {
  int counterexamples = 0;
  int proofs = 0;
  int false_proofs = 0;
  int false_alarms = 0;
  int inconclusive = 0;
  int timeout = 0;

  int total() const {
    return counterexamples + proofs + false_proofs + false_alarms + inconclusive + timeout;
  }
};

struct BenchmarkResult {
  std::string path;
  Mode mode = Mode::Kiki;
  Verdict verdict;
};

struct Report {
  static constexpr int schema_version = 1;
  size_t corpus_size = 0;
  std::vector<Mode> modes;
  std::map<std::string, ModeCounts> counts;  // keyed by mode_name
  std::vector<BenchmarkResult> results;      // corpus order, mode-major
  double total_seconds = 0;
};

namespace detail {

inline void count_verdict(ModeCounts& c, Verdict::Kind expected, const Verdict& v) {
  switch (v.kind) {
    case Verdict::Kind::Safe:
      ++(expected == Verdict::Kind::Safe ? c.proofs : c.false_proofs);
      break;
    case Verdict::Kind::Unsafe:
      ++(expected == Verdict::Kind::Unsafe ? c.counterexamples : c.false_alarms);
      break;
    case Verdict::Kind::Unknown: ++c.inconclusive; break;
    case Verdict::Kind::ResourceOut: ++c.timeout; break;
  }
}

}  // namespace detail

/// Runs every manifest entry under every requested mode (kiki and portfolio
/// are always included) and tallies the verdicts against the expectations.
/// Workers each own their engine run; rows keep a fixed order regardless of
/// the worker count.
inline Report run_corpus(const std::string& dir, std::vector<Mode> modes,
                         const EngineConfig& base, int jobs = 1) {
  for (Mode required : {Mode::Kiki, Mode::Portfolio}) {
    bool have = false;
    for (Mode m : modes) have = have || m == required;
    if (!have) modes.push_back(required);
  }

  std::vector<CorpusEntry> entries = load_manifest(dir);
  Report rep;
  rep.corpus_size = entries.size();
  rep.modes = modes;

  struct Task {
    const CorpusEntry* entry;
    Mode mode;
  };
  std::vector<Task> tasks;
  for (Mode m : modes)
    for (const CorpusEntry& e : entries) tasks.push_back({&e, m});
  rep.results.resize(tasks.size());

  std::atomic<size_t> next{0};
  std::mutex fail_mu;
  std::string failure;
  auto worker = [&] {
    for (size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      const Task& t = tasks[i];
      try {
        std::ifstream in(t.entry->path);
        if (!in) throw std::runtime_error("cannot open " + t.entry->path);
        std::stringstream ss;
        ss << in.rdbuf();
        Program p = parse_program(ss.str());
        EngineConfig cfg = base;
        cfg.mode = t.mode;
        rep.results[i] = {t.entry->path, t.mode, run_verify(p, cfg)};
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lk(fail_mu);
        if (failure.empty()) failure = t.entry->path + ": " + ex.what();
      }
    }
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (!failure.empty()) throw std::runtime_error(failure);

  for (Mode m : modes) rep.counts[mode_name(m)] = {};
  size_t i = 0;
  for (Mode m : modes)
    for (const CorpusEntry& e : entries) {
      const Verdict& v = rep.results[i++].verdict;
      detail::count_verdict(rep.counts[mode_name(m)], e.expected, v);
      rep.total_seconds += v.seconds;
    }
  return rep;
}

inline const char* verdict_word(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Safe: return "safe";
    case Verdict::Kind::Unsafe: return "unsafe";
    case Verdict::Kind::Unknown: return "unknown";
    case Verdict::Kind::ResourceOut: return "resource-out";
  }
  return "?";
}

inline void report_text(std::ostream& os, const Report& rep) {
  os << "corpus: " << rep.corpus_size << " benchmarks\n\n";
  os << std::left << std::setw(11) << "mode" << std::right << std::setw(17)
     << "counterexamples" << std::setw(8) << "proofs" << std::setw(14) << "false proofs"
     << std::setw(14) << "false alarms" << std::setw(14) << "inconclusive"
     << std::setw(9) << "timeout" << "\n";
  for (Mode m : rep.modes) {
    const ModeCounts& c = rep.counts.at(mode_name(m));
    os << std::left << std::setw(11) << mode_name(m) << std::right << std::setw(17)
       << c.counterexamples << std::setw(8) << c.proofs << std::setw(14) << c.false_proofs
       << std::setw(14) << c.false_alarms << std::setw(14) << c.inconclusive
       << std::setw(9) << c.timeout << "\n";
  }
  os << "\ntotal runtime " << std::fixed << std::setprecision(2) << rep.total_seconds
     << "s\n\n";
  for (const BenchmarkResult& r : rep.results) {
    os << std::left << std::setw(11) << mode_name(r.mode) << " " << std::setw(12)
       << verdict_word(r.verdict.kind) << " k=" << std::setw(3) << r.verdict.k << " "
       << std::fixed << std::setprecision(3) << r.verdict.seconds << "s  " << r.path
       << "\n";
  }
}

inline void report_json(std::ostream& os, const Report& rep) {
  nlohmann::json j;
  j["schema_version"] = Report::schema_version;
  j["corpus_size"] = rep.corpus_size;
  j["total_seconds"] = rep.total_seconds;
  j["modes"] = nlohmann::json::object();
  for (Mode m : rep.modes) {
    const ModeCounts& c = rep.counts.at(mode_name(m));
    j["modes"][mode_name(m)] = {{"counterexamples", c.counterexamples},
                                {"proofs", c.proofs},
                                {"false_proofs", c.false_proofs},
                                {"false_alarms", c.false_alarms},
                                {"inconclusive", c.inconclusive},
                                {"timeout", c.timeout}};
  }
  j["results"] = nlohmann::json::array();
  for (const BenchmarkResult& r : rep.results)
    j["results"].push_back({{"path", r.path},
                            {"mode", mode_name(r.mode)},
                            {"verdict", verdict_word(r.verdict.kind)},
                            {"k", r.verdict.k},
                            {"seconds", r.verdict.seconds}});
  os << j.dump(2) << "\n";
}

}  // namespace kiwi
