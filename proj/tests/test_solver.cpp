// Bit-blasting checked against the constant evaluator: exhaustive per-op
// circuits at small widths plus random expression trees.
#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kiwi/solver.hpp"

using namespace kiwi;

namespace {

struct OpGen {
  ExprPool& p;
  std::mt19937_64& rng;
  BvType t;
  std::vector<ExprRef> leaves;

  ExprRef gen(int depth) {
    if (depth == 0 || rng() % 4 == 0) {
      if (rng() % 3 == 0) return p.constant(BvConst(t, rng()));
      return leaves[rng() % leaves.size()];
    }
    switch (rng() % 12) {
      case 0: return p.add(gen(depth - 1), gen(depth - 1));
      case 1: return p.sub(gen(depth - 1), gen(depth - 1));
      case 2: return p.mul(gen(depth - 1), gen(depth - 1));
      case 3: return p.div(gen(depth - 1), gen(depth - 1));
      case 4: return p.mod(gen(depth - 1), gen(depth - 1));
      case 5: return p.bit_and(gen(depth - 1), gen(depth - 1));
      case 6: return p.bit_or(gen(depth - 1), gen(depth - 1));
      case 7: return p.bit_xor(gen(depth - 1), gen(depth - 1));
      case 8: return p.neg(gen(depth - 1));
      case 9: return p.shl(gen(depth - 1), gen(depth - 1));
      case 10: return p.mk(t.is_signed() ? Op::Ashr : Op::Lshr, t, {gen(depth - 1), gen(depth - 1)});
      default: return p.ite(p.lt(gen(depth - 1), gen(depth - 1)), gen(depth - 1), gen(depth - 1));
    }
  }
};

}  // namespace

TEST(BvSolver, ExhaustiveBinaryOpsWidth3) {
  for (unsigned su = 0; su < 2; ++su) {
    BvType t = su ? BvType::s(3) : BvType::u(3);
    ExprPool p;
    BvSolver s(p);
    ExprRef x = p.var("x", t), y = p.var("y", t);
    std::vector<ExprRef> nodes = {
        p.add(x, y), p.sub(x, y), p.mul(x, y), p.div(x, y), p.mod(x, y),
        p.bit_and(x, y), p.bit_or(x, y), p.bit_xor(x, y), p.neg(x),
        p.shl(x, y), p.mk(su ? Op::Ashr : Op::Lshr, t, {x, y}),
        p.bit_not(x)};
    std::vector<ExprRef> preds = {p.eq(x, y), p.ne(x, y), p.lt(x, y), p.le(x, y)};
    for (ExprRef n : nodes) s.bits(n);
    for (ExprRef n : preds) s.bits(n);
    for (uint64_t a = 0; a < 8; ++a) {
      for (uint64_t b = 0; b < 8; ++b) {
        sat::Lit act = s.fresh_lit();
        s.assert_implies(act, p.eq(x, p.constant(BvConst(t, a))));
        s.assert_implies(act, p.eq(y, p.constant(BvConst(t, b))));
        ASSERT_EQ(s.solve({act}), SolveStatus::Sat);
        Assignment env{{"x", BvConst(t, a)}, {"y", BvConst(t, b)}};
        for (ExprRef n : nodes)
          ASSERT_EQ(s.value_of(n), eval_expr(n, env))
              << expr_str(n) << " at x=" << a << " y=" << b << " " << t.str();
        for (ExprRef n : preds)
          ASSERT_EQ(s.value_of(n).is_true(), eval_expr(n, env).is_true())
              << expr_str(n) << " at x=" << a << " y=" << b << " " << t.str();
      }
    }
  }
}

TEST(BvSolver, ExtendExtractIte) {
  ExprPool p;
  BvSolver s(p);
  BvType t8 = BvType::s(8), t12 = BvType::s(12);
  ExprRef x = p.var("x", t8);
  ExprRef wide = p.sign_extend(x, t12);
  ExprRef narrow = p.extract_low(wide, BvType::s(4));
  ExprRef cond = p.lt(x, p.int_const(t8, 0));
  ExprRef sel = p.ite(cond, x, p.neg(x));
  s.bits(wide);
  s.bits(narrow);
  s.bits(sel);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 64; ++i) {
    uint64_t a = rng() & 0xff;
    sat::Lit act = s.fresh_lit();
    s.assert_implies(act, p.eq(x, p.constant(BvConst(t8, a))));
    ASSERT_EQ(s.solve({act}), SolveStatus::Sat);
    Assignment env{{"x", BvConst(t8, a)}};
    EXPECT_EQ(s.value_of(wide), eval_expr(wide, env));
    EXPECT_EQ(s.value_of(narrow), eval_expr(narrow, env));
    EXPECT_EQ(s.value_of(sel), eval_expr(sel, env));
  }
}

TEST(BvSolver, RandomTreesAgainstEvaluator) {
  std::mt19937_64 rng(42);
  for (int round = 0; round < 300; ++round) {
    unsigned w = 4 + (unsigned)(rng() % 5);
    BvType t = rng() & 1 ? BvType::s(w) : BvType::u(w);
    ExprPool p;
    BvSolver s(p);
    ExprRef x = p.var("x", t), y = p.var("y", t), z = p.var("z", t);
    OpGen g{p, rng, t, {x, y, z}};
    ExprRef e = g.gen(4);
    BvConst va(t, rng()), vb(t, rng()), vc(t, rng());
    s.assert_expr(p.eq(x, p.constant(va)));
    s.assert_expr(p.eq(y, p.constant(vb)));
    s.assert_expr(p.eq(z, p.constant(vc)));
    s.bits(e);
    ASSERT_EQ(s.solve({}), SolveStatus::Sat);
    Assignment env{{"x", va}, {"y", vb}, {"z", vc}};
    ASSERT_EQ(s.value_of(e), eval_expr(e, env)) << expr_str(e) << " " << t.str();
    // the negated comparison must be unsatisfiable
    ExprRef pin = p.eq(e, p.constant(eval_expr(e, env)));
    s.assert_expr(p.lnot(pin));
    ASSERT_EQ(s.solve({}), SolveStatus::Unsat) << expr_str(e);
  }
}

TEST(BvSolver, SolvesForInputs) {
  // x * x + y == 30 with y <= 5 over u8: x=5, y=5 is the only family
  ExprPool p;
  BvSolver s(p);
  BvType t = BvType::u(8);
  ExprRef x = p.var("x", t), y = p.var("y", t);
  s.assert_expr(p.eq(p.add(p.mul(x, x), y), p.int_const(t, 30)));
  s.assert_expr(p.le(y, p.int_const(t, 5)));
  ASSERT_EQ(s.solve({}), SolveStatus::Sat);
  Assignment m = s.model();
  uint64_t vx = (uint64_t)m.at("x").bits(), vy = (uint64_t)m.at("y").bits();
  EXPECT_EQ((vx * vx + vy) & 0xff, 30u);
  EXPECT_LE(vy, 5u);
}

TEST(BvSolver, IncrementalNarrowing) {
  ExprPool p;
  BvSolver s(p);
  BvType t = BvType::s(16);
  ExprRef x = p.var("x", t);
  s.assert_expr(p.le(p.int_const(t, 0), x));
  s.assert_expr(p.le(x, p.int_const(t, 100)));
  ASSERT_EQ(s.solve({}), SolveStatus::Sat);
  s.assert_expr(p.le(p.int_const(t, 50), x));
  ASSERT_EQ(s.solve({}), SolveStatus::Sat);
  int64_t v = (int64_t)s.value_of(x).as_int();
  EXPECT_GE(v, 50);
  EXPECT_LE(v, 100);
  s.assert_expr(p.lt(x, p.int_const(t, 50)));
  EXPECT_EQ(s.solve({}), SolveStatus::Unsat);
}

TEST(BvSolver, Deterministic) {
  for (int seed = 0; seed < 3; ++seed) {
    std::vector<int64_t> got;
    for (int run = 0; run < 2; ++run) {
      ExprPool p;
      BvSolver s(p);
      BvType t = BvType::s(12);
      ExprRef x = p.var("x", t), y = p.var("y", t);
      s.assert_expr(p.eq(p.add(x, y), p.int_const(t, 100 + seed)));
      s.assert_expr(p.lt(p.int_const(t, 0), x));
      ASSERT_EQ(s.solve({}), SolveStatus::Sat);
      got.push_back((int64_t)s.value_of(x).as_int());
      got.push_back((int64_t)s.value_of(y).as_int());
    }
    EXPECT_EQ(got[0], got[2]);
    EXPECT_EQ(got[1], got[3]);
  }
}

TEST(BvSolver, SharedNodesEncodeOnce) {
  ExprPool p;
  BvSolver s(p);
  BvType t = BvType::u(8);
  ExprRef x = p.var("x", t);
  ExprRef sq = p.mul(x, x);
  s.bits(sq);
  const auto& first = s.bits(sq);
  const auto& second = s.bits(p.mul(x, x));
  EXPECT_EQ(&first, &second);
}

TEST(BvSolver, DumpCnf) {
  ExprPool p;
  BvSolver s(p);
  ExprRef x = p.var("x", BvType::u(4));
  s.assert_expr(p.eq(x, p.int_const(BvType::u(4), 9)));
  std::ostringstream os;
  s.dump_cnf(os);
  EXPECT_NE(os.str().find("p cnf"), std::string::npos);
}
