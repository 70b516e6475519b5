/*
 * Incremental CDCL propositional solver.
 *
 * MiniSat-style: two-watched literals, first-UIP learning, VSIDS activities,
 * phase saving, Luby restarts and activity-based learnt-clause reduction.
 * Solving is done under assumptions; clauses are only ever added, so one
 * instance serves all checks of a verification run. Fully deterministic.
 */
#pragma once

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <vector>

namespace kiwi::sat {

/// Literal encoding: 2*var for the positive, 2*var+1 for the negated literal.
using Lit = int;
inline Lit mk_lit(int var, bool neg = false) { return 2 * var + (neg ? 1 : 0); }
inline Lit neg_lit(Lit l) { return l ^ 1; }
inline int lit_var(Lit l) { return l >> 1; }
inline bool lit_sign(Lit l) { return l & 1; }
/// DIMACS rendering: 1-based, negative for negated.
inline long lit_dimacs(Lit l) { return lit_sign(l) ? -(lit_var(l) + 1) : (lit_var(l) + 1); }

enum class SatResult { Sat, Unsat, Undef };

struct SatStats {
  uint64_t solves = 0;
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
};

struct ResourceLimits {
  // Zero means unlimited.
  uint64_t conflict_budget = 0;
  std::chrono::steady_clock::time_point deadline{};
  bool has_deadline = false;
  const std::atomic<bool>* cancel = nullptr;
};

class SatSolver {
  enum : uint8_t { kUndef = 2 };

  struct Clause {
    std::vector<Lit> lits;
    double activity = 0.0;
    bool learnt = false;
    bool deleted = false;
  };

  struct Watcher {
    int clause;
    Lit blocker;
  };

public:
  int new_var() {
    int v = (int)assigns_.size();
    assigns_.push_back(kUndef);
    phase_.push_back(false);
    level_.push_back(0);
    reason_.push_back(-1);
    activity_.push_back(0.0);
    seen_.push_back(0);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(v);
    return v;
  }

  int num_vars() const { return (int)assigns_.size(); }

  /// Adds a clause permanently. Returns false if the database became
  /// trivially unsatisfiable.
  bool add_clause(std::vector<Lit> lits) {
    assert(decision_level() == 0);
    if (!ok_) return false;
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    std::vector<Lit> out;
    for (size_t i = 0; i < lits.size(); ++i) {
      Lit l = lits[i];
      if (i + 1 < lits.size() && lits[i + 1] == neg_lit(l)) return true;  // tautology
      if (i > 0 && lits[i - 1] == neg_lit(l)) return true;
      uint8_t v = value(l);
      if (v == 1 && level_[lit_var(l)] == 0) return true;  // satisfied at root
      if (v == 0 && level_[lit_var(l)] == 0) continue;     // falsified at root
      out.push_back(l);
    }
    if (out.empty()) { ok_ = false; return false; }
    if (out.size() == 1) {
      if (value(out[0]) == 0) { ok_ = false; return false; }
      if (value(out[0]) == kUndef) {
        enqueue(out[0], -1);
        if (propagate() != -1) { ok_ = false; return false; }
      }
      return true;
    }
    attach(new_clause(std::move(out), false));
    return true;
  }

  SatResult solve(const std::vector<Lit>& assumptions, const ResourceLimits& limits = {}) {
    stats_.solves++;
    if (!ok_) return SatResult::Unsat;
    assumptions_ = assumptions;
    limits_ = limits;
    conflicts_at_start_ = stats_.conflicts;
    backtrack(0);

    uint64_t restart_seq = 0;
    SatResult res = SatResult::Undef;
    while (res == SatResult::Undef) {
      uint64_t budget = 64 * luby(2, restart_seq++);
      res = search(budget);
      if (res == SatResult::Undef && out_of_resources()) {
        backtrack(0);
        return SatResult::Undef;
      }
    }
    if (res == SatResult::Sat) {
      model_.assign(assigns_.begin(), assigns_.end());
    }
    backtrack(0);
    return res;
  }

  /// Value of `var` in the last satisfying model.
  bool model_value(int var) const {
    if (var >= (int)model_.size()) return false;
    return model_[var] == 1;
  }

  const SatStats& stats() const { return stats_; }

  void dump_dimacs(std::ostream& os) const {
    size_t n = 0;
    for (const auto& c : clauses_) if (!c.deleted && !c.learnt) n++;
    n += root_units_.size();
    os << "p cnf " << num_vars() << " " << n << "\n";
    for (Lit l : root_units_) os << lit_dimacs(l) << " 0\n";
    for (const auto& c : clauses_) {
      if (c.deleted || c.learnt) continue;
      for (Lit l : c.lits) os << lit_dimacs(l) << " ";
      os << "0\n";
    }
  }

private:
  // ---- state ----
  bool ok_ = true;
  std::vector<uint8_t> assigns_;        // 0 false, 1 true, kUndef
  std::vector<bool> phase_;
  std::vector<int> level_;
  std::vector<int> reason_;             // clause index or -1
  std::vector<double> activity_;
  std::vector<uint8_t> seen_;
  std::vector<Clause> clauses_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by literal
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  std::vector<Lit> assumptions_;
  std::vector<Lit> root_units_;
  std::vector<uint8_t> model_;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  double max_learnts_ = 4000.0;
  SatStats stats_;
  ResourceLimits limits_;
  uint64_t conflicts_at_start_ = 0;

  // order heap (max-heap on activity)
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  uint8_t value(Lit l) const {
    uint8_t v = assigns_[lit_var(l)];
    if (v == kUndef) return kUndef;
    return v ^ (uint8_t)lit_sign(l);
  }

  int decision_level() const { return (int)trail_lim_.size(); }

  static uint64_t luby(uint64_t y, uint64_t x) {
    uint64_t size, seq;
    for (size = 1, seq = 0; size < x + 1; seq++, size = 2 * size + 1) {}
    while (size - 1 != x) {
      size = (size - 1) >> 1;
      seq--;
      x = x % size;
    }
    uint64_t r = 1;
    while (seq--) r *= y;
    return r;
  }

  bool out_of_resources() const {
    if (limits_.conflict_budget &&
        stats_.conflicts - conflicts_at_start_ >= limits_.conflict_budget)
      return true;
    if (limits_.cancel && limits_.cancel->load(std::memory_order_relaxed)) return true;
    if (limits_.has_deadline &&
        std::chrono::steady_clock::now() >= limits_.deadline)
      return true;
    return false;
  }

  // ---- heap ----
  void heap_insert(int v) {
    heap_pos_.resize(std::max<size_t>(heap_pos_.size(), v + 1), -1);
    if (heap_pos_[v] != -1) return;
    heap_pos_[v] = (int)heap_.size();
    heap_.push_back(v);
    heap_up(heap_pos_[v]);
  }
  void heap_up(int i) {
    int v = heap_[i];
    while (i > 0) {
      int p = (i - 1) >> 1;
      if (activity_[heap_[p]] >= activity_[v]) break;
      heap_[i] = heap_[p]; heap_pos_[heap_[i]] = i;
      i = p;
    }
    heap_[i] = v; heap_pos_[v] = i;
  }
  void heap_down(int i) {
    int v = heap_[i];
    size_t n = heap_.size();
    while (true) {
      size_t c = 2 * (size_t)i + 1;
      if (c >= n) break;
      if (c + 1 < n && activity_[heap_[c + 1]] > activity_[heap_[c]]) c++;
      if (activity_[heap_[c]] <= activity_[v]) break;
      heap_[i] = heap_[c]; heap_pos_[heap_[i]] = i;
      i = (int)c;
    }
    heap_[i] = v; heap_pos_[v] = i;
  }
  int heap_pop() {
    int v = heap_[0];
    heap_pos_[v] = -1;
    heap_[0] = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) { heap_pos_[heap_[0]] = 0; heap_down(0); }
    return v;
  }

  void bump_var(int v) {
    activity_[v] += var_inc_;
    if (activity_[v] > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] != -1) heap_up(heap_pos_[v]);
  }

  // ---- clauses ----
  int new_clause(std::vector<Lit> lits, bool learnt) {
    clauses_.push_back(Clause{std::move(lits), 0.0, learnt, false});
    if (learnt) num_learnts_++;
    return (int)clauses_.size() - 1;
  }
  void attach(int ci) {
    const Clause& c = clauses_[ci];
    watches_[neg_lit(c.lits[0])].push_back({ci, c.lits[1]});
    watches_[neg_lit(c.lits[1])].push_back({ci, c.lits[0]});
  }

  void enqueue(Lit l, int reason) {
    assert(value(l) == kUndef);
    int v = lit_var(l);
    assigns_[v] = lit_sign(l) ? 0 : 1;
    phase_[v] = !lit_sign(l);
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
    if (decision_level() == 0) {
      if (reason == -1) root_units_.push_back(l);
    }
  }

  /// Returns the index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      Lit p = trail_[qhead_++];
      stats_.propagations++;
      auto& ws = watches_[p];
      size_t i = 0, j = 0;
      int confl = -1;
      for (; i < ws.size(); ++i) {
        Watcher w = ws[i];
        if (value(w.blocker) == 1) { ws[j++] = w; continue; }
        Clause& c = clauses_[w.clause];
        if (c.deleted) continue;
        // make sure the false literal is lits[1]
        Lit false_lit = neg_lit(p);
        if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
        Lit first = c.lits[0];
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = {w.clause, first};
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < c.lits.size(); ++k) {
          if (value(c.lits[k]) != 0) {
            std::swap(c.lits[1], c.lits[k]);
            watches_[neg_lit(c.lits[1])].push_back({w.clause, first});
            moved = true;
            break;
          }
        }
        if (moved) continue;
        // unit or conflict
        ws[j++] = {w.clause, first};
        if (value(first) == 0) {
          confl = w.clause;
          qhead_ = trail_.size();
          while (++i < ws.size()) ws[j++] = ws[i];
          break;
        }
        enqueue(first, w.clause);
      }
      ws.resize(j);
      if (confl != -1) return confl;
    }
    return -1;
  }

  void backtrack(int lvl) {
    if (decision_level() <= lvl) return;
    for (int i = (int)trail_.size() - 1; i >= trail_lim_[lvl]; --i) {
      int v = lit_var(trail_[i]);
      assigns_[v] = kUndef;
      if (heap_pos_[v] == -1) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
  }

  void analyze(int confl, std::vector<Lit>& learnt, int& out_level) {
    learnt.clear();
    learnt.push_back(0);  // placeholder for the asserting literal
    int path = 0;
    Lit p = -1;
    size_t idx = trail_.size();
    do {
      Clause& c = clauses_[confl];
      if (c.learnt) bump_clause(confl);
      for (size_t k = (p == -1 ? 0 : 1); k < c.lits.size(); ++k) {
        Lit q = c.lits[k];
        int v = lit_var(q);
        if (!seen_[v] && level_[v] > 0) {
          seen_[v] = 1;
          bump_var(v);
          if (level_[v] >= decision_level()) path++;
          else learnt.push_back(q);
        }
      }
      while (!seen_[lit_var(trail_[--idx])]) {}
      p = trail_[idx];
      confl = reason_[lit_var(p)];
      seen_[lit_var(p)] = 0;
      path--;
    } while (path > 0);
    learnt[0] = neg_lit(p);

    // simple self-subsumption minimization; removed literals still need
    // their seen_ flag cleared afterwards
    std::vector<Lit> to_clear(learnt);
    size_t j = 1;
    for (size_t i = 1; i < learnt.size(); ++i) {
      int v = lit_var(learnt[i]);
      int r = reason_[v];
      if (r == -1) { learnt[j++] = learnt[i]; continue; }
      bool redundant = true;
      for (Lit q : clauses_[r].lits) {
        int qv = lit_var(q);
        if (qv != v && !seen_[qv] && level_[qv] > 0) { redundant = false; break; }
      }
      if (!redundant) learnt[j++] = learnt[i];
    }
    learnt.resize(j);

    out_level = 0;
    if (learnt.size() > 1) {
      size_t max_i = 1;
      for (size_t i = 2; i < learnt.size(); ++i)
        if (level_[lit_var(learnt[i])] > level_[lit_var(learnt[max_i])]) max_i = i;
      std::swap(learnt[1], learnt[max_i]);
      out_level = level_[lit_var(learnt[1])];
    }
    for (Lit l : to_clear) seen_[lit_var(l)] = 0;
  }

  void bump_clause(int ci) {
    Clause& c = clauses_[ci];
    c.activity += cla_inc_;
    if (c.activity > 1e20) {
      for (auto& cl : clauses_)
        if (cl.learnt) cl.activity *= 1e-20;
      cla_inc_ *= 1e-20;
    }
  }

  void reduce_db() {
    std::vector<int> learnts;
    for (int i = 0; i < (int)clauses_.size(); ++i)
      if (clauses_[i].learnt && !clauses_[i].deleted) learnts.push_back(i);
    std::sort(learnts.begin(), learnts.end(), [&](int a, int b) {
      return clauses_[a].activity < clauses_[b].activity;
    });
    size_t target = learnts.size() / 2;
    size_t removed = 0;
    for (int ci : learnts) {
      if (removed >= target) break;
      if (is_reason(ci) || clauses_[ci].lits.size() <= 2) continue;
      clauses_[ci].deleted = true;
      num_learnts_--;
      removed++;
    }
    for (auto& ws : watches_) {
      ws.erase(std::remove_if(ws.begin(), ws.end(),
                              [&](const Watcher& w) { return clauses_[w.clause].deleted; }),
               ws.end());
    }
  }

  bool is_reason(int ci) const {
    const Clause& c = clauses_[ci];
    int v = lit_var(c.lits[0]);
    return assigns_[v] != kUndef && reason_[v] == ci;
  }

  SatResult search(uint64_t conflict_limit) {
    uint64_t conflicts_here = 0;
    std::vector<Lit> learnt;
    while (true) {
      int confl = propagate();
      if (confl != -1) {
        stats_.conflicts++;
        conflicts_here++;
        if (decision_level() == 0) { ok_ = false; return SatResult::Unsat; }
        int bt_level;
        analyze(confl, learnt, bt_level);
        backtrack(bt_level);
        if (learnt.size() == 1) {
          if (value(learnt[0]) == kUndef) enqueue(learnt[0], -1);
        } else {
          int ci = new_clause(learnt, true);
          attach(ci);
          bump_clause(ci);
          enqueue(learnt[0], ci);
        }
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;
        if ((stats_.conflicts & 1023) == 0 && out_of_resources()) return SatResult::Undef;
      } else {
        if (conflicts_here >= conflict_limit) { backtrack(0); return SatResult::Undef; }
        if (out_of_resources()) return SatResult::Undef;
        if ((double)num_learnts_ > max_learnts_) {
          reduce_db();
          max_learnts_ *= 1.3;
        }
        // place assumptions first
        Lit next = -1;
        while (decision_level() < (int)assumptions_.size()) {
          Lit a = assumptions_[decision_level()];
          if (value(a) == 1) {
            trail_lim_.push_back((int)trail_.size());  // dummy level
          } else if (value(a) == 0) {
            return SatResult::Unsat;  // falsified assumption
          } else {
            next = a;
            break;
          }
        }
        if (next == -1) {
          // regular decision
          while (!heap_.empty()) {
            int v = heap_[0];
            if (assigns_[v] == kUndef) break;
            heap_pop();
          }
          if (heap_.empty()) return SatResult::Sat;
          int v = heap_pop();
          next = mk_lit(v, !phase_[v]);
        }
        stats_.decisions++;
        trail_lim_.push_back((int)trail_.size());
        enqueue(next, -1);
      }
    }
  }

  size_t num_learnts_ = 0;
};

}  // namespace kiwi::sat
