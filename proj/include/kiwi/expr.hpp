/*
 * Hash-consed bit-vector expression DAG.
 *
 * Expressions are interned in an ExprPool; structurally equal nodes share
 * one representative, which the bit-blaster relies on to encode each node
 * exactly once. Nodes are immutable and live as long as their pool.
 */
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "kiwi/bv.hpp"

namespace kiwi {

enum class Op : uint8_t {
  Const, Var,
  Add, Sub, Neg, Mul, Div, Mod,
  BitAnd, BitOr, BitXor, BitNot,
  Shl, Lshr, Ashr,
  Eq, Ne, Slt, Sle, Ult, Ule,
  Ite,
  And, Or, Not, Implies,
  ZeroExt, SignExt, Extract,
};

struct Expr;
using ExprRef = const Expr*;

struct Expr {
  Op op;
  BvType type;
  BvConst value;             // Const only
  std::string name;          // Var only
  std::vector<ExprRef> args;
  uint64_t id = 0;           // dense, per pool, in creation order
};

class ExprPool {
public:
  ExprRef constant(const BvConst& c) {
    Expr e{Op::Const, c.type(), c, "", {}, 0};
    return intern(std::move(e));
  }
  ExprRef bool_const(bool b) { return constant(BvConst::bool_val(b)); }
  ExprRef int_const(const BvType& t, int128 v) { return constant(BvConst::from_int(t, v)); }

  ExprRef var(const std::string& name, const BvType& t) {
    Expr e{Op::Var, t, {}, name, {}, 0};
    return intern(std::move(e));
  }

  ExprRef mk(Op op, const BvType& t, std::vector<ExprRef> args) {
    check_types(op, t, args);
    Expr e{op, t, {}, "", std::move(args), 0};
    return intern(std::move(e));
  }

  // arithmetic / bitwise (operands and result share a type)
  ExprRef add(ExprRef a, ExprRef b) { return mk(Op::Add, a->type, {a, b}); }
  ExprRef sub(ExprRef a, ExprRef b) { return mk(Op::Sub, a->type, {a, b}); }
  ExprRef neg(ExprRef a) { return mk(Op::Neg, a->type, {a}); }
  ExprRef mul(ExprRef a, ExprRef b) { return mk(Op::Mul, a->type, {a, b}); }
  ExprRef div(ExprRef a, ExprRef b) { return mk(Op::Div, a->type, {a, b}); }
  ExprRef mod(ExprRef a, ExprRef b) { return mk(Op::Mod, a->type, {a, b}); }
  ExprRef bit_and(ExprRef a, ExprRef b) { return mk(Op::BitAnd, a->type, {a, b}); }
  ExprRef bit_or(ExprRef a, ExprRef b) { return mk(Op::BitOr, a->type, {a, b}); }
  ExprRef bit_xor(ExprRef a, ExprRef b) { return mk(Op::BitXor, a->type, {a, b}); }
  ExprRef bit_not(ExprRef a) { return mk(Op::BitNot, a->type, {a}); }
  ExprRef shl(ExprRef a, ExprRef b) { return mk(Op::Shl, a->type, {a, b}); }
  ExprRef lshr(ExprRef a, ExprRef b) { return mk(Op::Lshr, a->type, {a, b}); }
  ExprRef ashr(ExprRef a, ExprRef b) { return mk(Op::Ashr, a->type, {a, b}); }

  // predicates
  ExprRef eq(ExprRef a, ExprRef b) { return mk(Op::Eq, BvType::boolean(), {a, b}); }
  ExprRef ne(ExprRef a, ExprRef b) { return mk(Op::Ne, BvType::boolean(), {a, b}); }
  /// Signedness-aware comparison on same-typed operands.
  ExprRef lt(ExprRef a, ExprRef b) {
    return mk(a->type.is_signed() ? Op::Slt : Op::Ult, BvType::boolean(), {a, b});
  }
  ExprRef le(ExprRef a, ExprRef b) {
    return mk(a->type.is_signed() ? Op::Sle : Op::Ule, BvType::boolean(), {a, b});
  }
  ExprRef gt(ExprRef a, ExprRef b) { return lt(b, a); }
  ExprRef ge(ExprRef a, ExprRef b) { return le(b, a); }

  ExprRef ite(ExprRef c, ExprRef t, ExprRef f) { return mk(Op::Ite, t->type, {c, t, f}); }

  // boolean structure
  ExprRef land(ExprRef a, ExprRef b) { return mk(Op::And, BvType::boolean(), {a, b}); }
  ExprRef lor(ExprRef a, ExprRef b) { return mk(Op::Or, BvType::boolean(), {a, b}); }
  ExprRef lnot(ExprRef a) { return mk(Op::Not, BvType::boolean(), {a}); }
  ExprRef implies(ExprRef a, ExprRef b) { return mk(Op::Implies, BvType::boolean(), {a, b}); }

  ExprRef conj(const std::vector<ExprRef>& xs) {
    if (xs.empty()) return bool_const(true);
    ExprRef r = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) r = land(r, xs[i]);
    return r;
  }
  ExprRef disj(const std::vector<ExprRef>& xs) {
    if (xs.empty()) return bool_const(false);
    ExprRef r = xs[0];
    for (size_t i = 1; i < xs.size(); ++i) r = lor(r, xs[i]);
    return r;
  }

  ExprRef zero_extend(ExprRef a, const BvType& to) { return mk(Op::ZeroExt, to, {a}); }
  ExprRef sign_extend(ExprRef a, const BvType& to) { return mk(Op::SignExt, to, {a}); }
  ExprRef extract_low(ExprRef a, const BvType& to) { return mk(Op::Extract, to, {a}); }

  /// Widen `a` to type `to` respecting the signedness of `a`.
  ExprRef promote(ExprRef a, const BvType& to) {
    if (a->type.width == to.width) return a;
    if (a->type.width > to.width) return extract_low(a, to);
    return a->type.is_signed() ? sign_extend(a, to) : zero_extend(a, to);
  }

  size_t size() const { return nodes_.size(); }

private:
  struct Key {
    Op op; BvType type; uint128 cbits; std::string name; std::vector<uint64_t> argids;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = std::hash<int>()((int)k.op) * 31 + k.type.width * 2 + (int)k.type.sign;
      h = h * 1000003 + (size_t)(k.cbits ^ (k.cbits >> 64));
      h = h * 1000003 + std::hash<std::string>()(k.name);
      for (uint64_t a : k.argids) h = h * 1000003 + a;
      return h;
    }
  };

  static void check_types(Op op, const BvType& t, const std::vector<ExprRef>& args);

  ExprRef intern(Expr&& e) {
    Key k{e.op, e.type, e.value.bits(), e.name, {}};
    k.argids.reserve(e.args.size());
    for (ExprRef a : e.args) k.argids.push_back(a->id);
    auto it = index_.find(k);
    if (it != index_.end()) return it->second;
    e.id = nodes_.size();
    nodes_.push_back(std::move(e));
    ExprRef r = &nodes_.back();
    index_.emplace(std::move(k), r);
    return r;
  }

  std::deque<Expr> nodes_;
  std::unordered_map<Key, ExprRef, KeyHash> index_;
};

inline void ExprPool::check_types(Op op, const BvType& t, const std::vector<ExprRef>& args) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::logic_error(std::string("expression typing violation: ") + what);
  };
  switch (op) {
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: case Op::Mod:
    case Op::BitAnd: case Op::BitOr: case Op::BitXor:
      require(args.size() == 2 && args[0]->type == args[1]->type && args[0]->type == t,
              "binary arithmetic operands must share the result type");
      break;
    case Op::Neg: case Op::BitNot:
      require(args.size() == 1 && args[0]->type == t, "unary operand must match result type");
      break;
    case Op::Shl: case Op::Lshr: case Op::Ashr:
      require(args.size() == 2 && args[0]->type == t, "shift value must match result type");
      break;
    case Op::Eq: case Op::Ne: case Op::Slt: case Op::Sle: case Op::Ult: case Op::Ule:
      require(args.size() == 2 && args[0]->type == args[1]->type && t.is_bool(),
              "comparison needs same-typed operands and bool result");
      break;
    case Op::Ite:
      require(args.size() == 3 && args[0]->type.is_bool() && args[1]->type == args[2]->type &&
              args[1]->type == t, "ite needs bool condition and same-typed branches");
      break;
    case Op::And: case Op::Or: case Op::Implies:
      require(args.size() == 2 && args[0]->type.is_bool() && args[1]->type.is_bool() && t.is_bool(),
              "boolean connective needs bool operands");
      break;
    case Op::Not:
      require(args.size() == 1 && args[0]->type.is_bool() && t.is_bool(), "not needs bool operand");
      break;
    case Op::ZeroExt: case Op::SignExt:
      require(args.size() == 1 && t.width > args[0]->type.width, "extend target must be wider");
      break;
    case Op::Extract:
      require(args.size() == 1 && t.width <= args[0]->type.width, "extract target must not be wider");
      break;
    case Op::Const: case Op::Var:
      break;
  }
}

// ---- evaluation -------------------------------------------------------------

/// Assignment of constants to variable names.
using Assignment = std::map<std::string, BvConst>;

/// Evaluates `e` under `env`. Throws if a variable is unassigned.
inline BvConst eval_expr(ExprRef e, const Assignment& env) {
  switch (e->op) {
    case Op::Const: return e->value;
    case Op::Var: {
      auto it = env.find(e->name);
      if (it == env.end()) throw std::runtime_error("unassigned variable: " + e->name);
      return it->second;
    }
    default: break;
  }
  auto a = [&](size_t i) { return eval_expr(e->args[i], env); };
  switch (e->op) {
    case Op::Add: return bv_add(a(0), a(1));
    case Op::Sub: return bv_sub(a(0), a(1));
    case Op::Neg: return bv_neg(a(0));
    case Op::Mul: return bv_mul(a(0), a(1));
    case Op::Div: return bv_div(a(0), a(1));
    case Op::Mod: return bv_mod(a(0), a(1));
    case Op::BitAnd: return bv_and(a(0), a(1));
    case Op::BitOr: return bv_or(a(0), a(1));
    case Op::BitXor: return bv_xor(a(0), a(1));
    case Op::BitNot: return bv_not(a(0));
    case Op::Shl: return bv_shl(a(0), a(1));
    case Op::Lshr: return bv_lshr(a(0), a(1));
    case Op::Ashr: return bv_ashr(a(0), a(1));
    case Op::Eq: return BvConst::bool_val(a(0) == a(1));
    case Op::Ne: return BvConst::bool_val(!(a(0) == a(1)));
    case Op::Slt: return BvConst::bool_val(bv_slt(a(0), a(1)));
    case Op::Sle: return BvConst::bool_val(!bv_slt(a(1), a(0)));
    case Op::Ult: return BvConst::bool_val(bv_ult(a(0), a(1)));
    case Op::Ule: return BvConst::bool_val(!bv_ult(a(1), a(0)));
    case Op::Ite: return a(0).is_true() ? a(1) : a(2);
    case Op::And: return BvConst::bool_val(a(0).is_true() && a(1).is_true());
    case Op::Or: return BvConst::bool_val(a(0).is_true() || a(1).is_true());
    case Op::Not: return BvConst::bool_val(!a(0).is_true());
    case Op::Implies: return BvConst::bool_val(!a(0).is_true() || a(1).is_true());
    case Op::ZeroExt: return bv_zero_extend(a(0), e->type);
    case Op::SignExt: return bv_sign_extend(a(0), e->type);
    case Op::Extract: return bv_extract(a(0), e->type);
    default: throw std::logic_error("eval: unhandled op");
  }
}

// ---- printing ---------------------------------------------------------------

/// Precedence levels for the paper-style textual rendering.
inline int op_prec(Op op) {
  switch (op) {
    case Op::Const: case Op::Var: return 100;
    case Op::Neg: case Op::Not: case Op::BitNot:
    case Op::ZeroExt: case Op::SignExt: case Op::Extract: return 90;
    case Op::Mul: case Op::Div: case Op::Mod: return 80;
    case Op::Add: case Op::Sub: return 70;
    case Op::Shl: case Op::Lshr: case Op::Ashr: return 60;
    case Op::Slt: case Op::Sle: case Op::Ult: case Op::Ule: return 50;
    case Op::Eq: case Op::Ne: return 45;
    case Op::BitAnd: return 44;
    case Op::BitXor: return 43;
    case Op::BitOr: return 42;
    case Op::And: return 40;
    case Op::Or: return 30;
    case Op::Implies: return 20;
    case Op::Ite: return 10;
  }
  return 0;
}

inline std::string expr_str(ExprRef e);

inline std::string paren_operand(ExprRef child, int parent_prec) {
  std::string s = expr_str(child);
  if (op_prec(child->op) <= parent_prec && op_prec(child->op) < 100) return "(" + s + ")";
  return s;
}

inline std::string expr_str(ExprRef e) {
  int p = op_prec(e->op);
  auto bin = [&](const char* sym) {
    return paren_operand(e->args[0], p - 1) + " " + sym + " " + paren_operand(e->args[1], p);
  };
  switch (e->op) {
    case Op::Const: return e->value.str();
    case Op::Var: return e->name;
    case Op::Add: return bin("+");
    case Op::Sub: return bin("-");
    case Op::Neg: return "-" + paren_operand(e->args[0], p);
    case Op::Mul: return bin("*");
    case Op::Div: return bin("/");
    case Op::Mod: return bin("%");
    case Op::BitAnd: return bin("&");
    case Op::BitOr: return bin("|");
    case Op::BitXor: return bin("^");
    case Op::BitNot: return "~" + paren_operand(e->args[0], p);
    case Op::Shl: return bin("<<");
    case Op::Lshr: case Op::Ashr: return bin(">>");
    case Op::Eq: return bin("==");
    case Op::Ne: return bin("!=");
    case Op::Slt: case Op::Ult: return bin("<");
    case Op::Sle: case Op::Ule: return bin("<=");
    case Op::Ite:
      return paren_operand(e->args[0], p) + " ? " + paren_operand(e->args[1], p) +
             " : " + paren_operand(e->args[2], p - 1);
    case Op::And: return bin("&&");
    case Op::Or: return bin("||");
    case Op::Not: return "!" + paren_operand(e->args[0], p);
    case Op::Implies: return bin("==>");
    case Op::ZeroExt: case Op::SignExt:
      return "(" + e->type.str() + ")" + paren_operand(e->args[0], p);
    case Op::Extract:
      return "(" + e->type.str() + ")" + paren_operand(e->args[0], p);
  }
  return "?";
}

}  // namespace kiwi
