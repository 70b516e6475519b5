// Template construction, row bounds, concretization, and the body join
// scaffold, checked against brute-force enumeration at small widths.
#include <gtest/gtest.h>

#include "kiwi/domains.hpp"
#include "kiwi/parser.hpp"
#include "kiwi/solver.hpp"

using namespace kiwi;

namespace {

struct Enc {
  Program prog;
  ExprPool pool;
  BvSolver solver;
  SsaEncoder enc;
  explicit Enc(const char* src, int round = 0)
      : prog(parse_program(src)), solver(pool), enc(prog, solver) {
    enc.encode_round(round);
  }
};

const char* kCount =
    "void main() { unsigned x = 0; while (x < 10) { x = x + 1; } assert(x == 10); }";

const char* kTwoVars = R"(
void main() {
  u8 a = 0; u8 b = 10; i8 c = 0;
  while (a < b) { a = a + 1; b = b - 1; c = c + 1; }
})";

}  // namespace

TEST(Domains, IntervalTemplateShape) {
  Enc e(kCount);
  GuardedTemplate t = make_template(e.enc, DomainKind::Intervals);
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].text(), "x#lb3");
  EXPECT_EQ(t.rows[1].text(), "-x#lb3");
  // u32 operand promotes to 33-bit signed
  EXPECT_EQ(t.rows[0].ptype, BvType::s(33));
  EXPECT_EQ(t.rows[1].ptype, BvType::s(33));
}

TEST(Domains, LoopFreeProgramHasEmptyTemplate) {
  Enc e("void main() { int x = 1; assert(x == 1); }");
  GuardedTemplate t = make_template(e.enc, DomainKind::Octagons);
  EXPECT_TRUE(t.rows.empty());
}

TEST(Domains, PairDomainsRowCounts) {
  Enc e(kTwoVars);
  // a,b are u8 and pair up; c is i8 and only gets interval rows
  EXPECT_EQ(make_template(e.enc, DomainKind::Intervals).rows.size(), 6u);
  EXPECT_EQ(make_template(e.enc, DomainKind::Zones).rows.size(), 8u);
  EXPECT_EQ(make_template(e.enc, DomainKind::Octagons).rows.size(), 10u);
}

TEST(Domains, PromotionWidths) {
  Enc e(kTwoVars);
  GuardedTemplate t = make_template(e.enc, DomainKind::Octagons);
  for (const TemplateRow& r : t.rows) {
    ASSERT_TRUE(r.ptype.is_signed());
    bool sum = r.terms.size() == 2 && r.terms[0].second == r.terms[1].second;
    EXPECT_EQ(r.ptype.width, sum ? 10u : 9u) << r.text();
  }
}

TEST(Domains, RowMaxMatchesTypeExtremes) {
  Enc u32loop(kCount);
  GuardedTemplate t = make_template(u32loop.enc, DomainKind::Intervals);
  EXPECT_EQ(row_max(t.rows[0]), (int128)4294967295);  // x
  EXPECT_EQ(row_max(t.rows[1]), (int128)0);           // -x, x unsigned

  Enc i32loop("void main() { int x = 0; while (x < 5) { x = x + 1; } }");
  GuardedTemplate s = make_template(i32loop.enc, DomainKind::Intervals);
  EXPECT_EQ(row_max(s.rows[0]), (int128)2147483647);
  EXPECT_EQ(row_max(s.rows[1]), (int128)2147483648);  // negated i32 minimum
}

TEST(Domains, RowMaxBruteForceAtEightBits) {
  Enc e(kTwoVars);
  GuardedTemplate t = make_template(e.enc, DomainKind::Octagons);
  for (const TemplateRow& r : t.rows) {
    if (r.terms.size() != 2) continue;
    const BvType ta = r.li->lb.at(r.terms[0].first)->type;
    const BvType tb = r.li->lb.at(r.terms[1].first)->type;
    int128 best = 0;
    bool first = true;
    for (int a = 0; a < 256; ++a)
      for (int b = 0; b < 256; ++b) {
        int128 va = BvConst(ta, (uint128)a).as_int();
        int128 vb = BvConst(tb, (uint128)b).as_int();
        int128 v = r.terms[0].second * va + r.terms[1].second * vb;
        if (first || v > best) best = v;
        first = false;
      }
    EXPECT_EQ(row_max(r), best) << r.text();
  }
}

// evaluating the promoted row expression never wraps: it equals the exact
// integer combination for every 8-bit input
TEST(Domains, NoOverflowInPromotedRows) {
  Enc e(kTwoVars);
  GuardedTemplate t = make_template(e.enc, DomainKind::Octagons);
  for (const TemplateRow& r : t.rows) {
    if (r.terms.size() != 2) continue;
    std::map<std::string, ExprRef> vers;
    for (const auto& [v, lb] : r.li->lb) vers[v] = lb;
    ExprRef form = row_expr(e.pool, r, vers);
    for (int a = 0; a < 256; a += 7)
      for (int b = 0; b < 256; b += 5) {
        Assignment env;
        int128 expect = 0;
        int idx = 0;
        for (const auto& [v, sign] : r.terms) {
          BvConst c(r.li->lb.at(v)->type, (uint128)(idx++ == 0 ? a : b));
          env[r.li->lb.at(v)->name] = c;
          expect += sign * c.as_int();
        }
        // both variables may be the same program var; skip that case
        if (env.size() != r.terms.size()) continue;
        EXPECT_EQ(eval_expr(form, env).as_int(), expect) << r.text();
      }
  }
}

TEST(Domains, TopConcretizesToTrue) {
  Enc e(kCount);
  GuardedTemplate t = make_template(e.enc, DomainKind::Intervals);
  ExprRef c = concretize_head(e.pool, t, top_value(t));
  EXPECT_EQ(c, e.pool.bool_const(true));
}

TEST(Domains, HeadConcretizationConstrainsHavockedHead) {
  Enc e(kCount);
  GuardedTemplate t = make_template(e.enc, DomainKind::Intervals);
  AbstractValue v = {Bound::finite(10), Bound::finite(0)};
  e.solver.assert_expr(concretize_head(e.pool, t, v));
  const LoopInstanceInfo* li = e.enc.instances()[0];
  auto assume = [&](ExprRef extra) {
    std::vector<sat::Lit> as = e.enc.enable_assumptions();
    for (auto l : e.enc.havoc_ls_assumptions()) as.push_back(l);
    as.push_back(e.solver.literal(extra));
    return e.solver.solve(as);
  };
  ExprRef lb = li->lb.at("x");
  EXPECT_EQ(assume(e.pool.eq(lb, e.pool.int_const(lb->type, 10))), SolveStatus::Sat);
  EXPECT_EQ(assume(e.pool.eq(lb, e.pool.int_const(lb->type, 11))), SolveStatus::Unsat);
}

TEST(Domains, BottomForcesInitialEntry) {
  Enc e(kCount);
  GuardedTemplate t = make_template(e.enc, DomainKind::Intervals);
  e.solver.assert_expr(concretize_head(e.pool, t, bottom_value(t)));
  const LoopInstanceInfo* li = e.enc.instances()[0];
  // under Bottom no havocked head survives: the loop select must stay off
  std::vector<sat::Lit> as = e.enc.enable_assumptions();
  as.push_back(e.solver.literal(li->ls[li->top()]));
  EXPECT_EQ(e.solver.solve(as), SolveStatus::Unsat);
  // the init branch is still alive
  as = e.enc.enable_assumptions();
  as.push_back(sat::neg_lit(e.solver.literal(li->ls[li->top()])));
  EXPECT_EQ(e.solver.solve(as), SolveStatus::Sat);
}

TEST(Domains, BodyJoinRoutesInitAndBodyValues) {
  Enc e(kCount);
  const LoopInstanceInfo* li = e.enc.instances()[0];
  int cut = e.enc.numbering().loops.at(li->stmt).cut;
  BodyJoin j = make_body_join(e.pool, *li, cut, e.enc.round());
  for (ExprRef d : j.defs) e.solver.assert_expr(d);

  // init branch: x' carries the entry value 0
  std::vector<sat::Lit> as = e.enc.enable_assumptions();
  as.push_back(e.solver.literal(j.ig));
  ASSERT_EQ(e.solver.solve(as), SolveStatus::Sat);
  EXPECT_EQ((uint64_t)e.solver.value_of(j.post.at("x")).bits(), 0u);

  // body branch without init: x' is the end-of-body value 1 + head
  as = e.enc.enable_assumptions();
  as.push_back(e.solver.literal(e.pool.land(j.pg, e.pool.lnot(j.ig))));
  ASSERT_EQ(e.solver.solve(as), SolveStatus::Sat);
  uint64_t post = (uint64_t)e.solver.value_of(j.post.at("x")).bits();
  uint64_t phi = (uint64_t)e.solver.value_of(li->phis[0].at("x")).bits();
  EXPECT_EQ(post, phi + 1);
}

TEST(Domains, InvariantTextShape) {
  Enc e(kCount);
  GuardedTemplate t = make_template(e.enc, DomainKind::Intervals);
  AbstractValue v = {Bound::finite(10), Bound::bottom()};
  auto lines = invariant_text(t, v);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0], "guard#2 && guard#ls3 ==> x#lb3 <= 10");
  EXPECT_EQ(lines[1], "guard#2 && guard#ls3 ==> false");
}

TEST(Domains, RekeyCarriesBoundsAcrossBuilds) {
  Enc e(kCount);
  GuardedTemplate t1 = make_template(e.enc, DomainKind::Intervals);
  AbstractValue v = {Bound::finite(7), Bound::top()};
  e.enc.encode_round(2);
  GuardedTemplate t2 = make_template(e.enc, DomainKind::Intervals);
  AbstractValue w = rekey_value(t1, v, t2);
  ASSERT_EQ(w.size(), t2.rows.size());
  EXPECT_EQ(w[0], Bound::finite(7));
  EXPECT_EQ(w[1], Bound::top());
}
