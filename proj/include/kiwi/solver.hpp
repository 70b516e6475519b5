/*
 * Bit-blasting of bit-vector expressions to clauses, and the incremental
 * solving facade used by every check of an engine run.
 *
 * Each hash-consed expression node is encoded once (Tseitin-style); repeated
 * occurrences reuse the same literals. Constraints are only added, never
 * removed; retractable facts are attached to activation literals and
 * controlled through solve-time assumptions.
 */
#pragma once

#include <memory>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "kiwi/expr.hpp"
#include "kiwi/satbackend.hpp"

namespace kiwi {

struct SolverStats {
  uint64_t solve_calls = 0;
  uint64_t asserted = 0;
};

enum class SolveStatus { Sat, Unsat, ResourceOut };

class BvSolver {
public:
  explicit BvSolver(ExprPool& pool,
                    std::unique_ptr<sat::ISatBackend> backend = nullptr)
      : pool_(pool),
        backend_(backend ? std::move(backend)
                         : std::make_unique<sat::InternalBackend>()) {
    int t = backend_->new_var();
    backend_->add_clause({sat::mk_lit(t)});
    true_ = sat::mk_lit(t);
  }

  ExprPool& pool() { return pool_; }

  sat::Lit true_lit() const { return true_; }
  sat::Lit false_lit() const { return sat::neg_lit(true_); }

  sat::Lit fresh_lit() { return sat::mk_lit(backend_->new_var()); }

  /// Tseitin literal of a boolean expression.
  sat::Lit literal(ExprRef e) {
    if (!e->type.is_bool()) throw std::logic_error("literal() needs a boolean expression");
    return bits(e)[0];
  }

  /// Permanently asserts a boolean expression.
  void assert_expr(ExprRef e) {
    backend_->add_clause({literal(e)});
    stats_.asserted++;
  }

  /// Asserts guard => e; the fact is active only when `guard` is assumed.
  void assert_implies(sat::Lit guard, ExprRef e) {
    backend_->add_clause({sat::neg_lit(guard), literal(e)});
    stats_.asserted++;
  }

  SolveStatus solve(const std::vector<sat::Lit>& assumptions,
                    const sat::ResourceLimits& limits = {}) {
    stats_.solve_calls++;
    switch (backend_->solve(assumptions, limits)) {
      case sat::SatResult::Sat: return SolveStatus::Sat;
      case sat::SatResult::Unsat: return SolveStatus::Unsat;
      case sat::SatResult::Undef: return SolveStatus::ResourceOut;
    }
    return SolveStatus::ResourceOut;
  }

  /// Value of an already-encoded expression in the last model.
  BvConst value_of(ExprRef e) {
    auto it = bits_.find(e->id);
    if (it == bits_.end()) {
      // not part of the solved formula: evaluate from its leaves
      return eval_expr(e, model());
    }
    uint128 raw = 0;
    const auto& bs = it->second;
    for (size_t i = 0; i < bs.size(); ++i)
      if (lit_true_in_model(bs[i])) raw |= ((uint128)1) << i;
    return BvConst(e->type, raw);
  }

  bool lit_true_in_model(sat::Lit l) {
    bool v = backend_->model_value(sat::lit_var(l));
    return sat::lit_sign(l) ? !v : v;
  }

  /// Assignment for every program variable encoded so far.
  Assignment model() {
    Assignment m;
    for (const auto& [name, e] : vars_) m.emplace(name, value_of(e));
    return m;
  }

  const SolverStats& stats() const { return stats_; }

  void dump_cnf(std::ostream& os) const {
    auto* internal = dynamic_cast<sat::InternalBackend*>(backend_.get());
    if (!internal)
      throw std::runtime_error("--dump-cnf requires the built-in solver backend");
    internal->raw().dump_dimacs(os);
  }

  // ---- encoding -------------------------------------------------------------

  /// Bits of `e`, least significant first. Encodes the node on first use.
  const std::vector<sat::Lit>& bits(ExprRef e) {
    auto it = bits_.find(e->id);
    if (it != bits_.end()) return it->second;
    std::vector<sat::Lit> out = encode(e);
    assert(out.size() == e->type.width);
    auto [pos, _] = bits_.emplace(e->id, std::move(out));
    return pos->second;
  }

private:
  using Lit = sat::Lit;
  using Bits = std::vector<Lit>;

  std::vector<Lit> encode(ExprRef e) {
    switch (e->op) {
      case Op::Const: {
        Bits out(e->type.width);
        for (unsigned i = 0; i < e->type.width; ++i)
          out[i] = ((e->value.bits() >> i) & 1) ? true_ : false_lit();
        return out;
      }
      case Op::Var: {
        Bits out(e->type.width);
        for (auto& b : out) b = fresh_lit();
        vars_.emplace(e->name, e);
        return out;
      }
      default: break;
    }
    // operands first
    std::vector<const Bits*> a;
    a.reserve(e->args.size());
    for (ExprRef c : e->args) a.push_back(&bits(c));
    switch (e->op) {
      case Op::Add: return adder(*a[0], *a[1], false_lit());
      case Op::Sub: return subtractor(*a[0], *a[1]);
      case Op::Neg: return negate(*a[0]);
      case Op::Mul: return multiplier(*a[0], *a[1]);
      case Op::Div: return divider(e, *a[0], *a[1], true);
      case Op::Mod: return divider(e, *a[0], *a[1], false);
      case Op::BitAnd: return bitwise(*a[0], *a[1], [&](Lit x, Lit y) { return and_gate(x, y); });
      case Op::BitOr: return bitwise(*a[0], *a[1], [&](Lit x, Lit y) { return or_gate(x, y); });
      case Op::BitXor: return bitwise(*a[0], *a[1], [&](Lit x, Lit y) { return xor_gate(x, y); });
      case Op::BitNot: return invert(*a[0]);
      case Op::Shl: return shifter(*a[0], *a[1], /*left=*/true, false_lit());
      case Op::Lshr: return shifter(*a[0], *a[1], /*left=*/false, false_lit());
      case Op::Ashr: return shifter(*a[0], *a[1], /*left=*/false, a[0]->back());
      case Op::Eq: return {equal(*a[0], *a[1])};
      case Op::Ne: return {sat::neg_lit(equal(*a[0], *a[1]))};
      case Op::Ult: return {uless(*a[0], *a[1])};
      case Op::Ule: return {sat::neg_lit(uless(*a[1], *a[0]))};
      case Op::Slt: return {uless(flip_sign(*a[0]), flip_sign(*a[1]))};
      case Op::Sle: return {sat::neg_lit(uless(flip_sign(*a[1]), flip_sign(*a[0])))};
      case Op::Ite: {
        Bits out(e->type.width);
        Lit s = (*a[0])[0];
        for (unsigned i = 0; i < e->type.width; ++i)
          out[i] = mux(s, (*a[1])[i], (*a[2])[i]);
        return out;
      }
      case Op::And: return {and_gate((*a[0])[0], (*a[1])[0])};
      case Op::Or: return {or_gate((*a[0])[0], (*a[1])[0])};
      case Op::Not: return {sat::neg_lit((*a[0])[0])};
      case Op::Implies: return {or_gate(sat::neg_lit((*a[0])[0]), (*a[1])[0])};
      case Op::ZeroExt: {
        Bits out = *a[0];
        out.resize(e->type.width, false_lit());
        return out;
      }
      case Op::SignExt: {
        Bits out = *a[0];
        out.resize(e->type.width, a[0]->back());
        return out;
      }
      case Op::Extract: {
        return Bits(a[0]->begin(), a[0]->begin() + e->type.width);
      }
      default: throw std::logic_error("encode: unhandled op");
    }
  }

  // ---- gates ----------------------------------------------------------------

  Lit and_gate(Lit x, Lit y) {
    if (x == true_) return y;
    if (y == true_) return x;
    if (x == false_lit() || y == false_lit()) return false_lit();
    if (x == y) return x;
    if (x == sat::neg_lit(y)) return false_lit();
    Lit g = fresh_lit();
    backend_->add_clause({sat::neg_lit(g), x});
    backend_->add_clause({sat::neg_lit(g), y});
    backend_->add_clause({g, sat::neg_lit(x), sat::neg_lit(y)});
    return g;
  }
  Lit or_gate(Lit x, Lit y) { return sat::neg_lit(and_gate(sat::neg_lit(x), sat::neg_lit(y))); }
  Lit xor_gate(Lit x, Lit y) {
    if (x == false_lit()) return y;
    if (y == false_lit()) return x;
    if (x == true_) return sat::neg_lit(y);
    if (y == true_) return sat::neg_lit(x);
    if (x == y) return false_lit();
    if (x == sat::neg_lit(y)) return true_;
    Lit g = fresh_lit();
    backend_->add_clause({sat::neg_lit(g), x, y});
    backend_->add_clause({sat::neg_lit(g), sat::neg_lit(x), sat::neg_lit(y)});
    backend_->add_clause({g, sat::neg_lit(x), y});
    backend_->add_clause({g, x, sat::neg_lit(y)});
    return g;
  }
  Lit mux(Lit s, Lit t, Lit f) {
    if (s == true_) return t;
    if (s == false_lit()) return f;
    if (t == f) return t;
    return or_gate(and_gate(s, t), and_gate(sat::neg_lit(s), f));
  }

  static Bits invert(const Bits& b) {
    Bits out(b.size());
    for (size_t i = 0; i < b.size(); ++i) out[i] = sat::neg_lit(b[i]);
    return out;
  }
  Bits flip_sign(const Bits& b) {
    Bits out = b;
    out.back() = sat::neg_lit(out.back());
    return out;
  }

  template <typename F>
  Bits bitwise(const Bits& x, const Bits& y, F f) {
    Bits out(x.size());
    for (size_t i = 0; i < x.size(); ++i) out[i] = f(x[i], y[i]);
    return out;
  }

  Bits adder(const Bits& x, const Bits& y, Lit cin) {
    Bits out(x.size());
    Lit c = cin;
    for (size_t i = 0; i < x.size(); ++i) {
      Lit s = xor_gate(xor_gate(x[i], y[i]), c);
      Lit c2 = or_gate(and_gate(x[i], y[i]), and_gate(xor_gate(x[i], y[i]), c));
      out[i] = s;
      c = c2;
    }
    return out;
  }

  Bits subtractor(const Bits& x, const Bits& y) { return adder(x, invert(y), true_); }

  Bits negate(const Bits& x) { return adder(Bits(x.size(), false_lit()), invert(x), true_); }

  Bits multiplier(const Bits& x, const Bits& y) {
    size_t w = x.size();
    Bits acc(w, false_lit());
    for (size_t i = 0; i < w; ++i) {
      // acc += (x << i) masked by y[i]
      Bits partial(w, false_lit());
      for (size_t j = i; j < w; ++j) partial[j] = and_gate(x[j - i], y[i]);
      acc = adder(acc, partial, false_lit());
    }
    return acc;
  }

  /// a < b on unsigned bit-vectors, ripple comparison from the LSB.
  Lit uless(const Bits& x, const Bits& y) {
    Lit lt = false_lit();
    for (size_t i = 0; i < x.size(); ++i) {
      Lit xi_lt = and_gate(sat::neg_lit(x[i]), y[i]);
      Lit eq = sat::neg_lit(xor_gate(x[i], y[i]));
      lt = or_gate(xi_lt, and_gate(eq, lt));
    }
    return lt;
  }

  Lit equal(const Bits& x, const Bits& y) {
    Lit e = true_;
    for (size_t i = 0; i < x.size(); ++i)
      e = and_gate(e, sat::neg_lit(xor_gate(x[i], y[i])));
    return e;
  }

  Bits shifter(const Bits& x, const Bits& amount, bool left, Lit fill) {
    size_t w = x.size();
    Bits cur = x;
    unsigned stages = 0;
    while ((1u << stages) < w) stages++;
    for (unsigned s = 0; s < stages && s < amount.size(); ++s) {
      size_t step = (size_t)1 << s;
      Bits shifted(w, fill);
      for (size_t i = 0; i < w; ++i) {
        if (left) {
          if (i >= step) shifted[i] = cur[i - step];
        } else {
          if (i + step < w) shifted[i] = cur[i + step];
        }
      }
      Bits next(w);
      for (size_t i = 0; i < w; ++i) next[i] = mux(amount[s], shifted[i], cur[i]);
      cur = next;
    }
    // any amount bit at or above the stage count shifts everything out
    Lit oob = false_lit();
    for (size_t s = stages; s < amount.size(); ++s) oob = or_gate(oob, amount[s]);
    if (oob != false_lit()) {
      for (size_t i = 0; i < w; ++i) cur[i] = mux(oob, fill, cur[i]);
    }
    return cur;
  }

  /// Restoring division; quot=true for the quotient, false for the remainder.
  /// Total semantics: x/0 is all-ones, x%0 is x.
  Bits divider(ExprRef e, const Bits& num, const Bits& den, bool quot) {
    size_t w = num.size();
    bool is_signed = e->type.is_signed();
    Bits n = num, d = den;
    Lit ns = false_lit(), ds = false_lit();
    if (is_signed) {
      ns = num.back();
      ds = den.back();
      n = mux_bits(ns, negate(num), num);
      d = mux_bits(ds, negate(den), den);
    }
    Bits q(w, false_lit());
    Bits r(w, false_lit());
    for (size_t i = w; i-- > 0;) {
      // r = (r << 1) | n[i]
      Bits r2(w);
      r2[0] = n[i];
      for (size_t j = 1; j < w; ++j) r2[j] = r[j - 1];
      Lit geq = sat::neg_lit(uless(r2, d));
      Bits diff = subtractor(r2, d);
      r = mux_bits(geq, diff, r2);
      q[i] = geq;
    }
    Bits result;
    if (quot) {
      if (is_signed) {
        Lit negq = xor_gate(ns, ds);
        result = mux_bits(negq, negate(q), q);
      } else {
        result = q;
      }
    } else {
      // remainder takes the sign of the dividend
      result = is_signed ? mux_bits(ns, negate(r), r) : r;
    }
    // division by zero
    Lit dz = equal(den, Bits(w, false_lit()));
    Bits on_zero = quot ? Bits(w, true_) : num;
    return mux_bits(dz, on_zero, result);
  }

  Bits mux_bits(Lit s, const Bits& t, const Bits& f) {
    Bits out(t.size());
    for (size_t i = 0; i < t.size(); ++i) out[i] = mux(s, t[i], f[i]);
    return out;
  }

  ExprPool& pool_;
  std::unique_ptr<sat::ISatBackend> backend_;
  sat::Lit true_;
  std::unordered_map<uint64_t, Bits> bits_;
  std::unordered_map<std::string, ExprRef> vars_;
  SolverStats stats_;
};

}  // namespace kiwi
