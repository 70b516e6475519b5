/*
 * Concrete interpreter for the input language. Used to replay counterexample
 * traces and as the ground-truth oracle in randomized tests. Semantics match
 * the bit-vector constant operations exactly (wrapping, total division).
 */
#pragma once

#include <functional>
#include <random>
#include <vector>

#include "kiwi/ast.hpp"
#include "kiwi/expr.hpp"

namespace kiwi {

/// Supplies values for nondeterministic reads, in program order.
class NondetSource {
public:
  virtual ~NondetSource() = default;
  virtual BvConst next(const BvType& t) = 0;
};

class RandomNondet final : public NondetSource {
public:
  explicit RandomNondet(uint64_t seed) : rng_(seed) {}
  BvConst next(const BvType& t) override {
    uint128 v = ((uint128)rng_() << 64) | rng_();
    return BvConst(t, v);
  }

private:
  std::mt19937_64 rng_;
};

/// Replays a recorded sequence; reports exhaustion.
class ReplayNondet final : public NondetSource {
public:
  explicit ReplayNondet(std::vector<BvConst> values) : values_(std::move(values)) {}
  BvConst next(const BvType& t) override {
    if (idx_ >= values_.size()) {
      exhausted_ = true;
      return BvConst(t, 0);
    }
    BvConst v = values_[idx_++];
    // widths must line up; a mismatch means the trace is malformed
    if (!(v.type() == t)) mismatched_ = true;
    return BvConst(t, v.bits());
  }
  bool exhausted() const { return exhausted_; }
  bool mismatched() const { return mismatched_; }
  size_t consumed() const { return idx_; }

private:
  std::vector<BvConst> values_;
  size_t idx_ = 0;
  bool exhausted_ = false;
  bool mismatched_ = false;
};

struct ExecResult {
  enum class Status { Finished, AssertFailed, AssumeStopped, StepLimit };
  Status status = Status::Finished;
  int line = 0, col = 0;       // failing assertion location
  uint64_t steps = 0;          // executed statements
  Assignment env;              // final variable values
  std::vector<BvConst> nondets;  // values drawn, in order
};

/// Observation hooks for tests that need the full execution structure.
struct ExecObserver {
  // called at each evaluation of a loop condition; iteration counts from 0
  std::function<void(const Stmt*, uint64_t iteration, const Assignment&)> on_loop_head;
  std::function<void(const Stmt*, const Assignment&)> after_stmt;
};

class Interp {
public:
  Interp(const Program& p, NondetSource& nd, uint64_t step_limit = 1'000'000)
      : p_(p), nd_(nd), step_limit_(step_limit) {}

  ExecObserver observer;

  ExecResult run() {
    ExecResult r;
    env_.clear();
    for (const auto& d : p_.decls) {
      BvConst v = d.init ? eval(*d.init, r) : draw(d.type, r);
      env_.insert_or_assign(d.name, v);
    }
    exec_block(p_.body, r);
    r.env = env_;
    return r;
  }

private:
  BvConst draw(const BvType& t, ExecResult& r) {
    BvConst v = nd_.next(t);
    r.nondets.push_back(v);
    return v;
  }

  BvConst eval(const AExpr& e, ExecResult& r) {
    switch (e.kind) {
      case AExpr::Kind::Num: return BvConst(e.type, e.num);
      case AExpr::Kind::Var: return env_.at(e.name);
      case AExpr::Kind::Nondet: return draw(e.type, r);
      case AExpr::Kind::Un: {
        BvConst a = eval(*e.a, r);
        switch (e.un) {
          case UnOp::Neg: return bv_neg(a);
          case UnOp::BitNot: return bv_not(a);
          case UnOp::LogNot: return BvConst::bool_val(!a.is_true());
        }
        break;
      }
      case AExpr::Kind::Bin: {
        BvConst a = eval(*e.a, r);
        // short circuit is observable through nondet draws
        if (e.bin == BinOp::LAnd) return a.is_true() ? eval(*e.b, r) : a;
        if (e.bin == BinOp::LOr) return a.is_true() ? a : eval(*e.b, r);
        BvConst b = eval(*e.b, r);
        switch (e.bin) {
          case BinOp::Add: return bv_add(a, b);
          case BinOp::Sub: return bv_sub(a, b);
          case BinOp::Mul: return bv_mul(a, b);
          case BinOp::Div: return bv_div(a, b);
          case BinOp::Mod: return bv_mod(a, b);
          case BinOp::BitAnd: return bv_and(a, b);
          case BinOp::BitOr: return bv_or(a, b);
          case BinOp::BitXor: return bv_xor(a, b);
          case BinOp::Shl: return bv_shl(a, b);
          case BinOp::Shr: return a.type().is_signed() ? bv_ashr(a, b) : bv_lshr(a, b);
          case BinOp::Eq: return BvConst::bool_val(a == b);
          case BinOp::Ne: return BvConst::bool_val(!(a == b));
          case BinOp::Lt:
            return BvConst::bool_val(a.type().is_signed() ? bv_slt(a, b) : bv_ult(a, b));
          case BinOp::Le:
            return BvConst::bool_val(a.type().is_signed() ? !bv_slt(b, a) : !bv_ult(b, a));
          case BinOp::Gt:
            return BvConst::bool_val(a.type().is_signed() ? bv_slt(b, a) : bv_ult(b, a));
          case BinOp::Ge:
            return BvConst::bool_val(a.type().is_signed() ? !bv_slt(a, b) : !bv_ult(a, b));
          default: break;
        }
        break;
      }
      case AExpr::Kind::Cond:
        return eval(*e.a, r).is_true() ? eval(*e.b, r) : eval(*e.c, r);
    }
    throw std::logic_error("eval: malformed expression");
  }

  // returns false when execution must stop (assert/assume/limit)
  bool exec_block(const std::vector<StmtPtr>& body, ExecResult& r) {
    for (const auto& s : body)
      if (!exec(*s, r)) return false;
    return true;
  }

  bool exec(const Stmt& s, ExecResult& r) {
    if (++r.steps > step_limit_) {
      r.status = ExecResult::Status::StepLimit;
      return false;
    }
    switch (s.kind) {
      case Stmt::Kind::Assign:
        env_.insert_or_assign(s.lhs, eval(*s.expr, r));
        break;
      case Stmt::Kind::If:
        if (eval(*s.expr, r).is_true()) {
          if (!exec_block(s.body, r)) return false;
        } else {
          if (!exec_block(s.els, r)) return false;
        }
        break;
      case Stmt::Kind::While: {
        uint64_t iter = 0;
        while (true) {
          if (observer.on_loop_head) observer.on_loop_head(&s, iter, env_);
          if (!eval(*s.expr, r).is_true()) break;
          if (!exec_block(s.body, r)) return false;
          iter++;
          if (r.steps > step_limit_) {
            r.status = ExecResult::Status::StepLimit;
            return false;
          }
        }
        break;
      }
      case Stmt::Kind::Assert:
        if (!eval(*s.expr, r).is_true()) {
          r.status = ExecResult::Status::AssertFailed;
          r.line = s.line;
          r.col = s.col;
          return false;
        }
        break;
      case Stmt::Kind::Assume:
        if (!eval(*s.expr, r).is_true()) {
          r.status = ExecResult::Status::AssumeStopped;
          return false;
        }
        break;
    }
    if (observer.after_stmt) observer.after_stmt(&s, env_);
    return true;
  }

  const Program& p_;
  NondetSource& nd_;
  uint64_t step_limit_;
  Assignment env_;
};

/// One-call convenience wrapper.
inline ExecResult run_program(const Program& p, NondetSource& nd,
                              uint64_t step_limit = 1'000'000) {
  return Interp(p, nd, step_limit).run();
}

}  // namespace kiwi
