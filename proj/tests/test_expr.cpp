// Expression pool: hash consing, type checking, evaluation, printing.
#include <gtest/gtest.h>

#include <random>

#include "kiwi/expr.hpp"

using namespace kiwi;

TEST(ExprPool, HashConsing) {
  ExprPool p;
  ExprRef x = p.var("x", BvType::s(32));
  ExprRef x2 = p.var("x", BvType::s(32));
  EXPECT_EQ(x, x2);
  ExprRef a = p.add(x, p.int_const(BvType::s(32), 1));
  ExprRef b = p.add(x, p.int_const(BvType::s(32), 1));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, p.add(x, p.int_const(BvType::s(32), 2)));
  // same name, different type is a different node
  EXPECT_NE(x, p.var("x", BvType::u(32)));
}

TEST(ExprPool, NoConstantFolding) {
  ExprPool p;
  ExprRef e = p.add(p.int_const(BvType::s(32), 1), p.int_const(BvType::s(32), 2));
  EXPECT_EQ(e->op, Op::Add);
  EXPECT_EQ(expr_str(e), "1 + 2");
}

TEST(ExprPool, TypingViolations) {
  ExprPool p;
  ExprRef i = p.var("i", BvType::s(32));
  ExprRef u = p.var("u", BvType::u(32));
  ExprRef b = p.var("b", BvType::boolean());
  EXPECT_THROW(p.add(i, u), std::logic_error);
  EXPECT_THROW(p.eq(i, b), std::logic_error);
  EXPECT_THROW(p.land(i, b), std::logic_error);
  EXPECT_THROW(p.ite(i, i, i), std::logic_error);
  EXPECT_THROW(p.sign_extend(i, BvType::s(16)), std::logic_error);
}

TEST(ExprEval, MatchesConstantOps) {
  ExprPool p;
  BvType t = BvType::s(8);
  ExprRef x = p.var("x", t), y = p.var("y", t);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    Assignment env{{"x", BvConst(t, rng())}, {"y", BvConst(t, rng())}};
    BvConst a = env.at("x"), b = env.at("y");
    EXPECT_EQ(eval_expr(p.add(x, y), env), bv_add(a, b));
    EXPECT_EQ(eval_expr(p.mul(x, y), env), bv_mul(a, b));
    EXPECT_EQ(eval_expr(p.div(x, y), env), bv_div(a, b));
    EXPECT_EQ(eval_expr(p.lt(x, y), env).is_true(), bv_slt(a, b));
    EXPECT_EQ(eval_expr(p.ite(p.le(x, y), x, y), env),
              bv_slt(b, a) ? b : a);
  }
}

TEST(ExprEval, UnassignedVarThrows) {
  ExprPool p;
  EXPECT_THROW(eval_expr(p.var("z", BvType::s(32)), {}), std::runtime_error);
}

TEST(ExprPrint, PaperStyle) {
  ExprPool p;
  BvType t = BvType::s(32);
  ExprRef x = p.var("x#2", t), g = p.var("guard#2", BvType::boolean());
  ExprRef def = p.eq(p.var("x#3", t), p.add(x, p.int_const(t, 1)));
  EXPECT_EQ(expr_str(def), "x#3 == x#2 + 1");
  EXPECT_EQ(expr_str(p.implies(g, def)), "guard#2 ==> x#3 == x#2 + 1");
  EXPECT_EQ(expr_str(p.ite(g, x, p.int_const(t, 0))), "guard#2 ? x#2 : 0");
  EXPECT_EQ(expr_str(p.mul(p.add(x, x), x)), "(x#2 + x#2) * x#2");
  EXPECT_EQ(expr_str(p.sub(x, p.sub(x, x))), "x#2 - (x#2 - x#2)");
  EXPECT_EQ(expr_str(p.lnot(g)), "!guard#2");
  EXPECT_EQ(expr_str(p.neg(x)), "-x#2");
  EXPECT_EQ(expr_str(p.sign_extend(x, BvType::s(33))), "(i33)x#2");
}

TEST(ExprPrint, Promote) {
  ExprPool p;
  ExprRef x = p.var("x", BvType::s(32));
  ExprRef w = p.promote(x, BvType::s(33));
  EXPECT_EQ(w->op, Op::SignExt);
  EXPECT_EQ(p.promote(x, BvType::s(32)), x);
  ExprRef u = p.var("u", BvType::u(32));
  EXPECT_EQ(p.promote(u, BvType::u(40))->op, Op::ZeroExt);
}
