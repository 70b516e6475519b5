/*
 * Template-parameter inference: inductivity checking, binary-search
 * strengthening, the fixpoint driver, and the model-enumeration baseline.
 *
 * All checks run on the engine's incrementally unwound formula. The loop
 * selector variables stay free here: the same formula then covers the entry
 * state, every init-prefix window, and the fully havocked k-step window, so
 * one UNSAT certifies both the base cases and the induction step.
 */
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kiwi/domains.hpp"
#include "kiwi/solver.hpp"
#include "kiwi/ssa.hpp"

namespace kiwi {

/// Thrown when the solver gives up; carries the phase for diagnostics.
struct ResourceLimit {
  std::string phase;
};

struct ViolatedRow {
  size_t row = 0;
  int128 witness = 0;  // value of the row form at the primed variables
};

struct Violation {
  std::vector<ViolatedRow> rows;  // nonempty
};

struct StrengthenRecord {
  int128 range = 0;  // u - l at search entry
  int calls = 0;     // solver calls spent in the search
};

struct InferStats {
  int inductive_checks = 0;
  int strengthen_calls = 0;
  int join_iterations = 0;
  int solver_calls = 0;
  std::vector<StrengthenRecord> searches;
};

class Inference {
public:
  Inference(SsaEncoder& enc, BvSolver& solver, DomainKind kind)
      : enc_(enc), solver_(solver), pool_(solver.pool()), kind_(kind) {}

  /// Rebuilds the template for the current unwinding and re-binds the body
  /// joins (the top copy moves every round, so join variables are per round).
  void refresh() {
    tmpl_ = make_template(enc_, kind_);
    if (enc_.round() == joins_round_ && joins_.size() == enc_.instances().size()) return;
    joins_round_ = enc_.round();
    joins_.clear();
    for (const LoopInstanceInfo* li : enc_.instances()) {
      int cut = enc_.numbering().loops.at(li->stmt).cut;
      BodyJoin j = make_body_join(pool_, *li, cut, joins_round_);
      for (ExprRef d : j.defs) solver_.assert_expr(d);
      joins_.emplace(li, std::move(j));
    }
  }

  const GuardedTemplate& tmpl() const { return tmpl_; }
  const BodyJoins& joins() const { return joins_; }

  /// Checks whether concretize(v) survives one step of the unwound system.
  /// nullopt means inductive; otherwise the violated rows with their
  /// witness values, and the solver still holds the model.
  std::optional<Violation> is_inductive(const AbstractValue& v,
                                        const std::vector<sat::Lit>& assumps) {
    sat::Lit act = solver_.fresh_lit();
    ExprRef head = concretize_head(pool_, tmpl_, v);
    ExprRef viol = body_violation(pool_, tmpl_, v, joins_);
    solver_.assert_implies(act, pool_.land(head, viol));
    std::vector<sat::Lit> as = assumps;
    as.push_back(act);
    ++stats.inductive_checks;
    ++stats.solver_calls;
    switch (solver_.solve(as)) {
      case SolveStatus::Unsat: return std::nullopt;
      case SolveStatus::ResourceOut: throw ResourceLimit{"inductivity check"};
      case SolveStatus::Sat: break;
    }
    Violation out;
    for (size_t i = 0; i < tmpl_.rows.size(); ++i) {
      const TemplateRow& r = tmpl_.rows[i];
      if (v[i].is_top()) continue;
      const BodyJoin& j = joins_.at(r.li);
      if (!guard_holds(j)) continue;
      int128 val = row_value(r, j);
      if (v[i].is_bottom() || val > v[i].value) out.rows.push_back({i, val});
    }
    if (out.rows.empty()) throw std::logic_error("inductivity model violates no row");
    return out;
  }

  /// Jumps every violated row to the maximal bound admitted by one step.
  /// Each row gets its own binary search; while a row is searched, its own
  /// bound is the search parameter at the loop heads and the other violated
  /// rows are relaxed to Top (they are re-maximized in the same pass and the
  /// result is re-checked before it is accepted). This makes the outcome
  /// deterministic where a joint search over the shared witness state would
  /// be decided by solver tie-breaking.
  AbstractValue strengthen(const AbstractValue& v, const Violation& viol,
                           const std::vector<sat::Lit>& assumps) {
    ++stats.strengthen_calls;
    std::set<size_t> in_r;
    for (const auto& vr : viol.rows) in_r.insert(vr.row);
    AbstractValue out = v;
    for (const auto& vr : viol.rows)
      out[vr.row] = Bound::finite(search_row(v, in_r, vr, assumps));
    return out;
  }

  /// Baseline: absorb the current model, one join per solver call.
  AbstractValue join_model(const AbstractValue& v, const Violation&) {
    ++stats.join_iterations;
    AbstractValue out = v;
    for (size_t i = 0; i < tmpl_.rows.size(); ++i) {
      const TemplateRow& r = tmpl_.rows[i];
      if (out[i].is_top()) continue;
      const BodyJoin& j = joins_.at(r.li);
      if (!guard_holds(j)) continue;
      int128 val = row_value(r, j);
      if (out[i].is_bottom() || val > out[i].value) out[i] = Bound::finite(val);
    }
    return out;
  }

  /// Fixpoint driver: from Bottom, alternate check and strengthen (or join)
  /// until inductive. Falls back to Top at the iteration cap, which is sound.
  AbstractValue infer(const std::vector<sat::Lit>& assumps, bool use_enum) {
    refresh();
    AbstractValue v = bottom_value(tmpl_);
    size_t rows = tmpl_.rows.size();
    size_t cap = use_enum ? rows * 600 + 16 : 64 * std::max<size_t>(rows, 1);
    for (size_t it = 0; it < cap; ++it) {
      auto viol = is_inductive(v, assumps);
      if (!viol) return v;
      v = use_enum ? join_model(v, *viol) : strengthen(v, *viol, assumps);
    }
    return top_value(tmpl_);
  }

  InferStats stats;
  bool per_row_floor = true;

private:
  /// Maximal bound for one violated row: head has this row parametric, the
  /// other violated rows at Top and the rest at v; the parameter must be
  /// reached again at the primed variables. Binary search between the
  /// witness value (known satisfiable) and the row's type maximum.
  int128 search_row(const AbstractValue& v, const std::set<size_t>& in_r,
                    const ViolatedRow& vr, const std::vector<sat::Lit>& assumps) {
    const TemplateRow& row = tmpl_.rows[vr.row];
    ExprRef delta = pool_.var("delta$" + std::to_string(search_id_++), row.ptype);

    sat::Lit act = solver_.fresh_lit();
    std::vector<ExprRef> cs;
    for (size_t i = 0; i < tmpl_.rows.size(); ++i) {
      const TemplateRow& r = tmpl_.rows[i];
      if (i != vr.row && (v[i].is_top() || in_r.count(i))) continue;
      for (int u = 0; u < r.li->copies; ++u) {
        ExprRef g = pool_.land(r.li->head_guards[u], r.li->ls[u]);
        if (i == vr.row) {
          cs.push_back(pool_.implies(g, pool_.le(row_expr(pool_, r, r.li->phis[u]), delta)));
        } else if (v[i].is_bottom()) {
          cs.push_back(pool_.implies(g, pool_.bool_const(false)));
        } else {
          ExprRef b = pool_.int_const(r.ptype, v[i].value);
          cs.push_back(pool_.implies(g, pool_.le(row_expr(pool_, r, r.li->phis[u]), b)));
        }
      }
    }
    const BodyJoin& j = joins_.at(row.li);
    cs.push_back(pool_.lor(j.ig, j.pg));
    cs.push_back(pool_.le(delta, row_expr(pool_, row, j.post)));
    if (per_row_floor)
      cs.push_back(pool_.le(pool_.int_const(row.ptype, vr.witness), delta));
    solver_.assert_implies(act, pool_.conj(cs));

    // delta = witness is satisfiable: the violation model extends to it
    int128 l = vr.witness, u = row_max(row), best = vr.witness;
    StrengthenRecord rec{u - l, 0};
    while (l < u) {
      int128 m = l + (u - l + 1) / 2;
      std::vector<sat::Lit> as = assumps;
      as.push_back(act);
      as.push_back(solver_.literal(pool_.le(pool_.int_const(row.ptype, m), delta)));
      ++rec.calls;
      ++stats.solver_calls;
      switch (solver_.solve(as)) {
        case SolveStatus::Sat:
          l = m;
          best = solver_.value_of(delta).as_int();
          break;
        case SolveStatus::Unsat:
          u = m - 1;
          break;
        case SolveStatus::ResourceOut:
          throw ResourceLimit{"strengthening search"};
      }
    }
    stats.searches.push_back(rec);
    return best;
  }

  bool guard_holds(const BodyJoin& j) {
    return solver_.value_of(j.ig).is_true() || solver_.value_of(j.pg).is_true();
  }

  // row form evaluated on the model of the primed variables; exact because
  // the promoted type cannot wrap
  int128 row_value(const TemplateRow& r, const BodyJoin& j) {
    int128 val = 0;
    for (const auto& [var, sign] : r.terms)
      val += sign * solver_.value_of(j.post.at(var)).as_int();
    return val;
  }

  SsaEncoder& enc_;
  BvSolver& solver_;
  ExprPool& pool_;
  DomainKind kind_;
  GuardedTemplate tmpl_;
  BodyJoins joins_;
  int joins_round_ = -1;
  uint64_t search_id_ = 0;
};

}  // namespace kiwi
