/*
 * Verification engine: the combined algorithm (invariant inference +
 * induction step + bounded concrete check on one growing formula) and the
 * three restricted modes it subsumes, plus the portfolio runner.
 *
 * Verdicts are certified before they are returned: Safe re-proves the
 * invariant and the property implication on a fresh solver, Unsafe replays
 * the extracted nondet sequence through the concrete interpreter. A failed
 * certification throws instead of returning a verdict.
 */
#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "kiwi/inference.hpp"
#include "kiwi/interp.hpp"
#include "kiwi/ssa.hpp"

namespace kiwi {

enum class Mode { Kiki, Ibmc, Kind, Ai, Portfolio };

inline const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Kiki: return "kiki";
    case Mode::Ibmc: return "ibmc";
    case Mode::Kind: return "kind";
    case Mode::Ai: return "ai";
    case Mode::Portfolio: return "portfolio";
  }
  return "?";
}

struct TraceStep {
  std::string text;
  int line = 0, col = 0;
  Assignment env;  // variable values after the statement
};

struct Trace {
  std::vector<TraceStep> steps;
  int fail_line = 0, fail_col = 0;
};

struct Verdict {
  enum class Kind { Safe, Unsafe, Unknown, ResourceOut };
  Kind kind = Kind::Unknown;
  int k = -1;                          // unwindings at the verdict
  std::vector<std::string> invariant;  // Safe: one line per template row
  Trace trace;                         // Unsafe
  std::vector<BvConst> nondets;        // Unsafe: replay seed, in draw order
  std::string reason;                  // Unknown reason / ResourceOut phase
  double seconds = 0;                  // engine time; portfolio reports the sum
  Mode via = Mode::Kiki;               // portfolio: the winning lane

  bool conclusive() const { return kind == Kind::Safe || kind == Kind::Unsafe; }
};

struct EngineConfig {
  Mode mode = Mode::Kiki;
  int max_k = 50;
  double timeout = 0;  // seconds of wall time; 0 = unlimited
  DomainKind domain = DomainKind::Intervals;
  bool infer_enum = false;
  std::atomic<bool>* cancel = nullptr;
  InferStats* stats = nullptr;
  // null = built-in solver; certification always uses the built-in one
  std::function<std::unique_ptr<sat::ISatBackend>()> backend;
};

namespace detail {

struct Cancelled {};

inline std::string stmt_brief(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Assign: return s.lhs + " = " + aexpr_str(*s.expr);
    case Stmt::Kind::If: return "if (" + aexpr_str(*s.expr) + ")";
    case Stmt::Kind::While: return "while (" + aexpr_str(*s.expr) + ")";
    case Stmt::Kind::Assert: return "assert(" + aexpr_str(*s.expr) + ")";
    case Stmt::Kind::Assume: return "__CPROVER_assume(" + aexpr_str(*s.expr) + ")";
  }
  return "?";
}

class EngineRun {
public:
  EngineRun(const Program& p, const EngineConfig& cfg)
      : p_(p), cfg_(cfg), solver_(pool_, cfg.backend ? cfg.backend() : nullptr),
        enc_(p, solver_),
        inf_(enc_, solver_, cfg.domain), start_(std::chrono::steady_clock::now()) {}

  Verdict run() {
    Verdict v;
    try {
      v = drive();
    } catch (const ResourceLimit& rl) {
      v.kind = Verdict::Kind::ResourceOut;
      v.reason = rl.phase;
    } catch (const Cancelled&) {
      v.kind = Verdict::Kind::Unknown;
      v.reason = "cancelled";
    }
    if (cfg_.stats) *cfg_.stats = inf_.stats;
    v.seconds = elapsed();
    v.via = cfg_.mode;
    return v;
  }

private:
  Verdict drive() {
    enc_.encode_round(0);
    if (Verdict v{}; initial_check(v)) return v;

    int rounds = cfg_.mode == Mode::Ai ? 1 : cfg_.max_k;
    for (int r = 0; r < rounds; ++r) {
      enc_.encode_round(r);
      std::vector<sat::Lit> p_lits = property_assumptions();
      ExprRef goal = goal_expr();

      AbstractValue inv;
      bool have_inv = cfg_.mode == Mode::Kiki || cfg_.mode == Mode::Ai;
      if (have_inv) {
        std::vector<sat::Lit> as = enc_.enable_assumptions();
        append(as, p_lits);
        inv = inf_.infer(as, cfg_.infer_enum);
      }

      if (cfg_.mode != Mode::Ibmc) {
        std::vector<sat::Lit> as = enc_.enable_assumptions();
        append(as, enc_.havoc_ls_assumptions());
        append(as, p_lits);
        if (have_inv) {
          sat::Lit act = solver_.fresh_lit();
          solver_.assert_implies(act, concretize_head(pool_, inf_.tmpl(), inv));
          as.push_back(act);
        }
        as.push_back(solver_.literal(goal));
        if (check(as, "induction step") == SolveStatus::Unsat)
          return safe_verdict(r, have_inv ? &inv : nullptr);
        if (cfg_.mode == Mode::Ai)
          return unknown(r, "abstract value too weak for the property");
      }

      {
        std::vector<sat::Lit> as = enc_.enable_assumptions();
        append(as, enc_.concrete_ls_assumptions());
        append(as, p_lits);
        as.push_back(solver_.literal(goal));
        if (check(as, "bounded concrete check") == SolveStatus::Sat)
          return unsafe_verdict(r);
      }
    }
    return unknown(cfg_.max_k - 1, "unwinding bound exhausted");
  }

  /// Zero-unwinding errors: any trace that never executes a loop body.
  bool initial_check(Verdict& out) {
    std::vector<sat::Lit> as = enc_.enable_assumptions();
    append(as, enc_.concrete_ls_assumptions());
    append(as, enc_.no_body_assumptions());
    as.push_back(solver_.literal(goal_expr(/*all=*/true)));
    if (check(as, "initial check") != SolveStatus::Sat) return false;
    out = unsafe_verdict(0);
    out.k = 0;
    return true;
  }

  // assertion instances at depths already covered by earlier rounds are
  // assumed to hold; they were goal conjuncts of those rounds
  std::vector<sat::Lit> property_assumptions() {
    std::vector<sat::Lit> out;
    for (const AssertInfo& a : enc_.asserts())
      if (!a.frontier) out.push_back(solver_.literal(pool_.implies(a.guard, a.prop)));
    return out;
  }

  ExprRef goal_expr(bool all = false) {
    std::vector<ExprRef> ds;
    for (const AssertInfo& a : enc_.asserts())
      if (all || a.frontier) ds.push_back(pool_.land(a.guard, pool_.lnot(a.prop)));
    return pool_.disj(ds);
  }

  SolveStatus check(const std::vector<sat::Lit>& as, const std::string& phase) {
    if (cfg_.cancel && cfg_.cancel->load()) throw Cancelled{};
    if (cfg_.timeout > 0 && elapsed() > cfg_.timeout) throw ResourceLimit{"timeout"};
    SolveStatus st = solver_.solve(as);
    if (st == SolveStatus::ResourceOut) throw ResourceLimit{phase};
    return st;
  }

  Verdict safe_verdict(int r, const AbstractValue* inv) {
    Verdict v;
    v.kind = Verdict::Kind::Safe;
    v.k = r + 1;
    std::map<std::string, Bound> by_key;
    if (inv) {
      v.invariant = invariant_text(inf_.tmpl(), *inv);
      for (size_t i = 0; i < inf_.tmpl().rows.size(); ++i)
        by_key[inf_.tmpl().rows[i].key()] = (*inv)[i];
    }
    recertify_safe(r, inv != nullptr, by_key);
    return v;
  }

  /// Independent proof on a fresh solver; throws on any discrepancy.
  void recertify_safe(int r, bool with_inv, const std::map<std::string, Bound>& by_key) {
    ExprPool pool2;
    BvSolver solver2(pool2);
    SsaEncoder enc2(p_, solver2);
    enc2.encode_round(r);
    Inference inf2(enc2, solver2, cfg_.domain);
    inf2.refresh();

    std::vector<sat::Lit> p_lits;
    if (cfg_.mode != Mode::Ai)
      for (const AssertInfo& a : enc2.asserts())
        if (!a.frontier) p_lits.push_back(solver2.literal(pool2.implies(a.guard, a.prop)));

    AbstractValue inv = top_value(inf2.tmpl());
    if (with_inv) {
      inv = bottom_value(inf2.tmpl());
      for (size_t i = 0; i < inf2.tmpl().rows.size(); ++i) {
        auto it = by_key.find(inf2.tmpl().rows[i].key());
        if (it == by_key.end())
          throw std::runtime_error("certification: row lost across encoders");
        inv[i] = it->second;
      }
      std::vector<sat::Lit> as = enc2.enable_assumptions();
      append(as, p_lits);
      if (inf2.is_inductive(inv, as))
        throw std::runtime_error("certification: invariant is not inductive");
    }

    std::vector<sat::Lit> as = enc2.enable_assumptions();
    append(as, enc2.havoc_ls_assumptions());
    append(as, p_lits);
    if (with_inv) {
      sat::Lit act = solver2.fresh_lit();
      solver2.assert_implies(act, concretize_head(pool2, inf2.tmpl(), inv));
      as.push_back(act);
    }
    std::vector<ExprRef> ds;
    for (const AssertInfo& a : enc2.asserts())
      if (a.frontier) ds.push_back(pool2.land(a.guard, pool2.lnot(a.prop)));
    as.push_back(solver2.literal(pool2.disj(ds)));
    if (solver2.solve(as) != SolveStatus::Unsat)
      throw std::runtime_error("certification: property implication failed");
  }

  Verdict unsafe_verdict(int r) {
    Verdict v;
    v.kind = Verdict::Kind::Unsafe;
    v.k = r + 1;
    auto fn = [&](const std::string& name, const BvType& t) {
      return solver_.value_of(pool_.var(name, t));
    };
    CopyWalker walker(p_, enc_.numbering(), r, fn);
    CopyWalker::Result wr = walker.run();
    if (wr.status != ExecResult::Status::AssertFailed)
      throw std::runtime_error("certification: model does not replay to a violation");

    // the user-facing trace is the concrete replay, not raw model bits
    ReplayNondet replay(wr.order);
    Interp it(p_, replay);
    it.observer.after_stmt = [&](const Stmt* s, const Assignment& env) {
      v.trace.steps.push_back({stmt_brief(*s), s->line, s->col, env});
    };
    ExecResult res = it.run();
    if (res.status != ExecResult::Status::AssertFailed || res.line != wr.line ||
        res.col != wr.col)
      throw std::runtime_error("certification: replay diverged from the model");
    v.trace.fail_line = res.line;
    v.trace.fail_col = res.col;
    v.nondets = wr.order;
    return v;
  }

  Verdict unknown(int r, const std::string& why) {
    Verdict v;
    v.kind = Verdict::Kind::Unknown;
    v.k = r + 1;
    v.reason = why;
    return v;
  }

  static void append(std::vector<sat::Lit>& to, const std::vector<sat::Lit>& from) {
    to.insert(to.end(), from.begin(), from.end());
  }

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  const Program& p_;
  EngineConfig cfg_;
  ExprPool pool_;
  BvSolver solver_;
  SsaEncoder enc_;
  Inference inf_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline Verdict run_mode(const Program& p, EngineConfig cfg) {
  return detail::EngineRun(p, cfg).run();
}

/// Runs ibmc, k-induction and the abstract-interpretation lane concurrently;
/// the first conclusive verdict wins and cancels the rest. Reported time is
/// the sum over lanes.
inline Verdict run_portfolio(const Program& p, EngineConfig cfg) {
  const Mode lanes[3] = {Mode::Ibmc, Mode::Kind, Mode::Ai};
  std::atomic<bool> cancel[3] = {false, false, false};
  Verdict results[3];
  std::vector<std::thread> threads;
  for (int i = 0; i < 3; ++i) {
    threads.emplace_back([&, i] {
      EngineConfig c = cfg;
      c.mode = lanes[i];
      c.cancel = &cancel[i];
      c.stats = nullptr;
      results[i] = run_mode(p, c);
      if (results[i].conclusive())
        for (int j = 0; j < 3; ++j)
          if (j != i) cancel[j] = true;
    });
  }
  for (auto& t : threads) t.join();

  double total = results[0].seconds + results[1].seconds + results[2].seconds;
  for (int i = 0; i < 3; ++i)
    if (results[i].conclusive()) {
      Verdict v = results[i];
      v.seconds = total;
      return v;
    }
  bool all_resource = true;
  for (const Verdict& v : results)
    if (v.kind != Verdict::Kind::ResourceOut) all_resource = false;
  Verdict v;
  v.kind = all_resource ? Verdict::Kind::ResourceOut : Verdict::Kind::Unknown;
  v.reason = "no lane was conclusive";
  v.k = cfg.max_k;
  v.seconds = total;
  v.via = Mode::Portfolio;
  return v;
}

inline Verdict run_verify(const Program& p, const EngineConfig& cfg) {
  if (cfg.mode == Mode::Portfolio) return run_portfolio(p, cfg);
  return run_mode(p, cfg);
}

/// True iff the recorded nondet choices drive the interpreter into the
/// reported assertion violation.
inline bool replay(const Program& p, const Verdict& v) {
  if (v.kind != Verdict::Kind::Unsafe) return false;
  ReplayNondet nd(v.nondets);
  ExecResult r = run_program(p, nd);
  return r.status == ExecResult::Status::AssertFailed && r.line == v.trace.fail_line &&
         r.col == v.trace.fail_col;
}

}  // namespace kiwi
