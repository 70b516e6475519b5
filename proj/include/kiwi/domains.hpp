/*
 * Guarded template domains over loop-back variables.
 *
 * A template is a fixed set of linear rows e_r(x) <= delta_r, each guarded by
 * the head guard and loop selector of its loop instance. An abstract value
 * assigns every row a bound: Bottom (row unreachable, concretizes to false
 * under the guard), a finite constant, or Top (no constraint). Rows are
 * evaluated in a promoted signed type wide enough that no input combination
 * wraps.
 */
#pragma once

#include <map>
#include <string>
#include <vector>

#include "kiwi/expr.hpp"
#include "kiwi/ssa.hpp"

namespace kiwi {

enum class DomainKind { Intervals, Zones, Octagons };

inline const char* domain_name(DomainKind k) {
  switch (k) {
    case DomainKind::Intervals: return "intervals";
    case DomainKind::Zones: return "zones";
    case DomainKind::Octagons: return "octagons";
  }
  return "?";
}

struct Bound {
  enum class Kind { Bottom, Finite, Top };
  Kind kind = Kind::Bottom;
  int128 value = 0;  // meaningful only when Finite

  static Bound bottom() { return {Kind::Bottom, 0}; }
  static Bound finite(int128 v) { return {Kind::Finite, v}; }
  static Bound top() { return {Kind::Top, 0}; }
  bool is_bottom() const { return kind == Kind::Bottom; }
  bool is_top() const { return kind == Kind::Top; }
  bool is_finite() const { return kind == Kind::Finite; }

  bool operator==(const Bound& o) const {
    return kind == o.kind && (kind != Kind::Finite || value == o.value);
  }

  std::string str() const {
    if (kind == Kind::Bottom) return "bottom";
    if (kind == Kind::Top) return "top";
    return int128_to_string(value);
  }
};

/// One bound per template row, in row order.
using AbstractValue = std::vector<Bound>;

/// Linear form sum(sign_i * var_i) over the loop-back variables of one loop
/// instance, with coefficients in {-1, +1}.
struct TemplateRow {
  const LoopInstanceInfo* li = nullptr;
  std::vector<std::pair<std::string, int>> terms;  // program var name, +-1
  BvType ptype;  // signed, wide enough for the extreme values

  /// Row rendered over the loop-back variable names, e.g. "-x#lb5".
  std::string text() const {
    std::string s;
    for (size_t i = 0; i < terms.size(); ++i) {
      const auto& [v, sign] = terms[i];
      if (sign < 0) s += i == 0 ? "-" : " - ";
      else if (i > 0) s += " + ";
      s += li->lb.at(v)->name;
    }
    return s;
  }

  /// Stable identity across re-built templates of the same program.
  std::string key() const { return li->ctx + "|" + text(); }
};

struct GuardedTemplate {
  DomainKind kind = DomainKind::Intervals;
  std::vector<TemplateRow> rows;
};

inline AbstractValue bottom_value(const GuardedTemplate& t) {
  return AbstractValue(t.rows.size(), Bound::bottom());
}
inline AbstractValue top_value(const GuardedTemplate& t) {
  return AbstractValue(t.rows.size(), Bound::top());
}

/// The row's linear form instantiated at `vers` (program var -> SSA expr),
/// computed in the promoted type.
inline ExprRef row_expr(ExprPool& pool, const TemplateRow& row,
                        const std::map<std::string, ExprRef>& vers) {
  ExprRef acc = nullptr;
  for (const auto& [v, sign] : row.terms) {
    ExprRef t = pool.promote(vers.at(v), row.ptype);
    if (sign < 0) t = pool.neg(t);
    acc = acc ? pool.add(acc, t) : t;
  }
  return acc;
}

/// Maximum of the row's form over all inputs of the variables' types.
inline int128 row_max(const TemplateRow& row) {
  int128 sum = 0;
  for (const auto& [v, sign] : row.terms) {
    BvType t = row.li->lb.at(v)->type;
    int128 hi, lo;
    if (t.is_signed()) {
      hi = ((int128)1 << (t.width - 1)) - 1;
      lo = -((int128)1 << (t.width - 1));
    } else {
      hi = (int128)((mask_of(t.width)));
      lo = 0;
    }
    sum += sign > 0 ? hi : -lo;
  }
  return sum;
}

namespace detail {

inline BvType promoted_type(const LoopInstanceInfo& li,
                            const std::vector<std::pair<std::string, int>>& terms) {
  unsigned w = 0;
  for (const auto& [v, s] : terms) w = std::max(w, li.lb.at(v)->type.width);
  // a difference of two w-bit values fits in w+1 signed bits; a sum needs w+2
  bool is_sum = terms.size() == 2 && terms[0].second == terms[1].second;
  return BvType::s(w + (is_sum ? 2 : 1));
}

inline void add_row(GuardedTemplate& t, const LoopInstanceInfo* li,
                    std::vector<std::pair<std::string, int>> terms) {
  TemplateRow r;
  r.li = li;
  r.terms = std::move(terms);
  r.ptype = promoted_type(*li, r.terms);
  t.rows.push_back(std::move(r));
}

}  // namespace detail

/// Builds the template over every loop-back variable of every loop instance.
/// Re-callable after further unwinding rounds; row keys stay stable.
inline GuardedTemplate make_template(const SsaEncoder& enc, DomainKind kind) {
  GuardedTemplate t;
  t.kind = kind;
  for (const LoopInstanceInfo* li : enc.instances()) {
    std::vector<std::string> vars;
    for (const auto& [v, e] : li->lb) vars.push_back(v);
    for (const auto& v : vars) {
      detail::add_row(t, li, {{v, +1}});
      detail::add_row(t, li, {{v, -1}});
    }
    if (kind == DomainKind::Zones || kind == DomainKind::Octagons) {
      for (size_t i = 0; i < vars.size(); ++i)
        for (size_t j = 0; j < vars.size(); ++j) {
          if (i == j) continue;
          // pairs only make sense at matching type; promotion stays simple
          if (!(li->lb.at(vars[i])->type == li->lb.at(vars[j])->type)) continue;
          detail::add_row(t, li, {{vars[i], +1}, {vars[j], -1}});
        }
    }
    if (kind == DomainKind::Octagons) {
      for (size_t i = 0; i < vars.size(); ++i)
        for (size_t j = i + 1; j < vars.size(); ++j) {
          if (!(li->lb.at(vars[i])->type == li->lb.at(vars[j])->type)) continue;
          detail::add_row(t, li, {{vars[i], +1}, {vars[j], +1}});
          detail::add_row(t, li, {{vars[i], -1}, {vars[j], -1}});
        }
    }
  }
  return t;
}

/// Carries bounds over from a previous template build by row key; rows new
/// to this build (instances born in later rounds) start at Bottom.
inline AbstractValue rekey_value(const GuardedTemplate& from, const AbstractValue& v,
                                 const GuardedTemplate& to) {
  std::map<std::string, Bound> by_key;
  for (size_t i = 0; i < from.rows.size(); ++i) by_key[from.rows[i].key()] = v[i];
  AbstractValue out = bottom_value(to);
  for (size_t i = 0; i < to.rows.size(); ++i) {
    auto it = by_key.find(to.rows[i].key());
    if (it != by_key.end()) out[i] = it->second;
  }
  return out;
}

/// Invariant assumed at every loop head: for each copy u of the row's loop,
/// headGuard_u && ls_u  ==>  e_r(phi_u) <= d_r.
inline ExprRef concretize_head(ExprPool& pool, const GuardedTemplate& t,
                               const AbstractValue& v) {
  std::vector<ExprRef> cs;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TemplateRow& r = t.rows[i];
    if (v[i].is_top()) continue;
    for (int u = 0; u < r.li->copies; ++u) {
      ExprRef g = pool.land(r.li->head_guards[u], r.li->ls[u]);
      if (v[i].is_bottom()) {
        cs.push_back(pool.implies(g, pool.bool_const(false)));
      } else {
        ExprRef bound = pool.int_const(r.ptype, v[i].value);
        cs.push_back(pool.implies(g, pool.le(row_expr(pool, r, r.li->phis[u]), bound)));
      }
    }
  }
  return pool.conj(cs);
}

/// Join scaffold at the far side of the induction step: fresh primed copies
/// x' of the loop variables pinned to the entry values when the loop is
/// entered fresh (ig) and to the end of the last body copy when the chain
/// completes (pg).
struct BodyJoin {
  ExprRef ig = nullptr;  // initial branch taken: loop entered, head not fed back
  ExprRef pg = nullptr;  // body branch: the deepest body copy completed
  std::map<std::string, ExprRef> post;  // primed loop variables x'
  std::vector<ExprRef> defs;            // definitions to assert once
};

/// `round` discriminates the fresh variables: the top copy (and with it ig)
/// changes every unwinding round, so joins are re-bound per round.
inline BodyJoin make_body_join(ExprPool& pool, const LoopInstanceInfo& li, int cut,
                               int round) {
  BodyJoin j;
  std::string tag = std::to_string(cut) + li.ctx + "$r" + std::to_string(round);
  j.ig = pool.var("guard#ig" + tag, BvType::boolean());
  j.pg = pool.var("guard#pg" + tag, BvType::boolean());
  j.defs.push_back(pool.eq(j.ig, pool.land(li.g_in, pool.lnot(li.ls[li.top()]))));
  j.defs.push_back(pool.eq(j.pg, li.end_guards[0]));
  for (const auto& [v, xin] : li.xin) {
    ExprRef p = pool.var(v + "#post" + tag, xin->type);
    j.post[v] = p;
    j.defs.push_back(pool.implies(j.ig, pool.eq(p, xin)));
    j.defs.push_back(pool.implies(pool.land(j.pg, pool.lnot(j.ig)), pool.eq(p, li.ends[0].at(v))));
  }
  return j;
}

using BodyJoins = std::map<const LoopInstanceInfo*, BodyJoin>;

/// The invariant restated over the primed variables: (ig || pg) ==> rows(x').
inline ExprRef concretize_body(ExprPool& pool, const GuardedTemplate& t,
                               const AbstractValue& v, const BodyJoins& joins) {
  std::vector<ExprRef> cs;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TemplateRow& r = t.rows[i];
    if (v[i].is_top()) continue;
    const BodyJoin& j = joins.at(r.li);
    ExprRef g = pool.lor(j.ig, j.pg);
    if (v[i].is_bottom()) {
      cs.push_back(pool.implies(g, pool.bool_const(false)));
    } else {
      ExprRef bound = pool.int_const(r.ptype, v[i].value);
      cs.push_back(pool.implies(g, pool.le(row_expr(pool, r, j.post), bound)));
    }
  }
  return pool.conj(cs);
}

/// Negation of concretize_body as an explicit disjunction of row violations;
/// a Top row cannot be violated, a Bottom row is violated by reaching it.
inline ExprRef body_violation(ExprPool& pool, const GuardedTemplate& t,
                              const AbstractValue& v, const BodyJoins& joins) {
  std::vector<ExprRef> ds;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TemplateRow& r = t.rows[i];
    if (v[i].is_top()) continue;
    const BodyJoin& j = joins.at(r.li);
    ExprRef g = pool.lor(j.ig, j.pg);
    if (v[i].is_bottom()) {
      ds.push_back(g);
    } else {
      ExprRef bound = pool.int_const(r.ptype, v[i].value);
      ds.push_back(pool.land(g, pool.lt(bound, row_expr(pool, r, j.post))));
    }
  }
  return pool.disj(ds);
}

/// Human-readable rows over the loop-back names, one line per row:
/// "guard#2 && guard#ls5 ==> x#lb5 <= 9".
inline std::vector<std::string> invariant_text(const GuardedTemplate& t,
                                               const AbstractValue& v) {
  std::vector<std::string> out;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TemplateRow& r = t.rows[i];
    std::string g =
        expr_str(r.li->body_guards[0]) + " && " + expr_str(r.li->ls[0]);
    std::string rhs;
    if (v[i].is_top()) rhs = "true";
    else if (v[i].is_bottom()) rhs = "false";
    else rhs = r.text() + " <= " + int128_to_string(v[i].value);
    out.push_back(g + " ==> " + rhs);
  }
  return out;
}

}  // namespace kiwi
