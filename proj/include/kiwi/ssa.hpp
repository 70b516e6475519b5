/*
 * SSA encoding of programs, with incremental loop unwinding.
 *
 * Loops are cut at the end of the body: the loop-head phi selects between the
 * incoming value and a free loop-back variable (x#lb..) via a free selector
 * (guard#ls..). Unwinding inserts new body copies before the existing ones;
 * bindings that are only valid at the current depth (the topmost head) are
 * guarded by per-round enable variables and activated through solve-time
 * assumptions, so the formula itself only grows.
 *
 * Naming: one counter numbers the program points; definitions take the index
 * of their controlling guard, e.g. x#2 under guard#2. Copy u > 0 of a loop
 * body appends %u. guard#0 is the entry guard.
 */
#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <unordered_set>

#include "kiwi/ast.hpp"
#include "kiwi/interp.hpp"
#include "kiwi/solver.hpp"

namespace kiwi {

// ---- syntax-directed numbering ----------------------------------------------

struct NodeNumbering {
  struct IfInfo {
    int then_idx = -1, else_idx = -1, phi_idx = -1;
    std::vector<std::string> join_vars;  // assigned in either branch, sorted
  };
  struct LoopInfo {
    int head = -1, body = -1, cut = -1, exit = -1;
    std::vector<std::string> loop_vars;  // assigned in the body, sorted
  };
  std::map<const Stmt*, IfInfo> ifs;
  std::map<const Stmt*, LoopInfo> loops;
  std::map<const Stmt*, int> def_idx;      // Assign statements
  std::map<const AExpr*, int> nondet_occ;  // nondet call sites, AST order
};

namespace detail {

inline void collect_assigned(const std::vector<StmtPtr>& body, std::set<std::string>& out) {
  for (const auto& s : body) {
    if (s->kind == Stmt::Kind::Assign) out.insert(s->lhs);
    collect_assigned(s->body, out);
    collect_assigned(s->els, out);
  }
}

inline void collect_nondets(const AExpr* e, NodeNumbering& n) {
  if (!e) return;
  if (e->kind == AExpr::Kind::Nondet)
    n.nondet_occ.emplace(e, (int)n.nondet_occ.size());
  collect_nondets(e->a.get(), n);
  collect_nondets(e->b.get(), n);
  collect_nondets(e->c.get(), n);
}

struct Numberer {
  NodeNumbering& n;
  int counter = 1;  // 0 is the entry guard
  std::set<std::pair<std::string, int>> used_defs;

  int def_index(const std::string& var, int guard_idx) {
    // a second definition of the same variable under one guard takes a
    // fresh index; names must be unique
    if (used_defs.insert({var, guard_idx}).second) return guard_idx;
    return counter++;
  }

  void block(const std::vector<StmtPtr>& body, int guard_idx) {
    for (const auto& s : body) stmt(*s, guard_idx);
  }

  void stmt(const Stmt& s, int guard_idx) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        collect_nondets(s.expr.get(), n);
        n.def_idx[&s] = def_index(s.lhs, guard_idx);
        break;
      }
      case Stmt::Kind::If: {
        collect_nondets(s.expr.get(), n);
        NodeNumbering::IfInfo info;
        info.then_idx = counter++;
        block(s.body, info.then_idx);
        if (!s.els.empty()) {
          info.else_idx = counter++;
          block(s.els, info.else_idx);
        }
        info.phi_idx = counter;  // shared with the next node, not consumed
        std::set<std::string> assigned;
        collect_assigned(s.body, assigned);
        collect_assigned(s.els, assigned);
        info.join_vars.assign(assigned.begin(), assigned.end());
        n.ifs[&s] = info;
        break;
      }
      case Stmt::Kind::While: {
        NodeNumbering::LoopInfo info;
        info.head = counter++;
        collect_nondets(s.expr.get(), n);
        info.body = counter++;
        block(s.body, info.body);
        info.cut = counter++;  // x#lb<cut>, guard#ls<cut>
        info.exit = counter++;
        std::set<std::string> assigned;
        collect_assigned(s.body, assigned);
        info.loop_vars.assign(assigned.begin(), assigned.end());
        n.loops[&s] = info;
        break;
      }
      case Stmt::Kind::Assert:
      case Stmt::Kind::Assume:
        collect_nondets(s.expr.get(), n);
        break;
    }
  }
};

}  // namespace detail

inline NodeNumbering number_nodes(const Program& p) {
  NodeNumbering n;
  detail::Numberer num{n, 1, {}};
  for (const auto& d : p.decls) detail::collect_nondets(d.init.get(), n);
  num.block(p.body, 0);
  return n;
}

/// SSA variable name for a nondet call site in a given copy context. The tag
/// separates distinct evaluation points of the same site (loop condition at
/// the head vs. at the body-end cut).
inline std::string nondet_name(int occ, const std::string& tag, const std::string& su) {
  return "nondet#" + std::to_string(occ) + tag + su;
}

// ---- encoder ----------------------------------------------------------------

struct LoopInstanceInfo {
  const Stmt* stmt = nullptr;
  std::string ctx;       // suffix of the enclosing copies
  int birth_round = 0;
  int copies = 0;        // copies 0..copies-1 exist; the top copy executes first
  ExprRef g_in = nullptr;
  std::map<std::string, ExprRef> xin;   // entry versions of the loop vars
  std::map<std::string, ExprRef> lb;    // free loop-back variables
  std::vector<ExprRef> enables;         // one per round since birth
  // per copy:
  std::vector<ExprRef> ls;              // free selectors guard#ls..
  std::vector<ExprRef> head_guards;     // guard#<head>
  std::vector<ExprRef> body_guards;     // guard#<body>
  std::vector<ExprRef> end_guards;      // body guard with trailing assumes folded in
  std::vector<ExprRef> exit_exprs;      // head exit: !cond(phi) && head_guard
  std::vector<ExprRef> conds;           // cond at head versions
  std::vector<std::map<std::string, ExprRef>> phis, ends;
  ExprRef cond_cut = nullptr;           // cond at end-of-copy-0 versions
  ExprRef exit_b = nullptr;             // exit after the last body copy
  ExprRef g_out = nullptr;
  std::map<std::string, ExprRef> outs;  // merged post-loop versions

  int top() const { return copies - 1; }
};

struct AssertInfo {
  ExprRef guard = nullptr;  // reachability of the assert
  ExprRef prop = nullptr;
  const Stmt* stmt = nullptr;
  bool frontier = false;    // all enclosing copy indices are zero
};

class SsaEncoder {
public:
  SsaEncoder(const Program& p, BvSolver& s)
      : prog_(p), solver_(s), pool_(s.pool()), numbering_(number_nodes(p)) {}

  const NodeNumbering& numbering() const { return numbering_; }
  int round() const { return round_; }

  /// Extends the encoding so that every loop has copies 0..r.
  void encode_round(int r) {
    for (int t = round_ + 1; t <= r; ++t) {
      round_ = t;
      walk_program();
    }
  }

  const std::vector<LoopInstanceInfo*>& instances() const { return instance_order_; }
  const std::vector<AssertInfo>& asserts() const { return asserts_; }
  const std::vector<ExprRef>& constraints() const { return constraints_; }

  ExprRef entry_guard() const { return entry_guard_; }

  /// Initial version (before any statement) of each declared variable.
  const std::map<std::string, ExprRef>& initial_versions() const { return init_vers_; }

  // ---- assumption sets ----

  /// Enable literals selecting the current unwinding depth.
  std::vector<sat::Lit> enable_assumptions() {
    std::vector<sat::Lit> out;
    for (auto* li : instance_order_) {
      for (size_t i = 0; i + 1 < li->enables.size(); ++i)
        out.push_back(sat::neg_lit(solver_.literal(li->enables[i])));
      out.push_back(solver_.literal(li->enables.back()));
    }
    return out;
  }

  /// Concrete execution shape: every entered loop starts at its top copy and
  /// runs down a fully connected chain; early exits leave at some head.
  std::vector<sat::Lit> concrete_ls_assumptions() {
    std::vector<sat::Lit> out;
    for (auto* li : instance_order_)
      for (int u = 0; u < li->copies; ++u) {
        sat::Lit l = solver_.literal(li->ls[u]);
        out.push_back(u == li->top() ? sat::neg_lit(l) : l);
      }
    return out;
  }

  /// Induction shape: every head, including the top, takes the fed-back value.
  std::vector<sat::Lit> havoc_ls_assumptions() {
    std::vector<sat::Lit> out;
    for (auto* li : instance_order_)
      for (int u = 0; u < li->copies; ++u)
        out.push_back(solver_.literal(li->ls[u]));
    return out;
  }

  /// Forbids every loop body: zero-unwinding traces only.
  std::vector<sat::Lit> no_body_assumptions() {
    std::vector<sat::Lit> out;
    for (auto* li : instance_order_)
      for (int u = 0; u < li->copies; ++u)
        out.push_back(sat::neg_lit(solver_.literal(li->body_guards[u])));
    return out;
  }

  void dump(std::ostream& os) const {
    for (ExprRef c : constraints_) os << expr_str(c) << "\n";
    if (!asserts_.empty()) os << "// assertions\n";
    for (const auto& a : asserts_)
      os << expr_str(pool_.implies(a.guard, a.prop)) << "\n";
  }

private:
  struct Ctx {
    ExprRef guard;               // reachability of the current point
    ExprRef pending;             // assumes not yet folded into a guard
    std::map<std::string, ExprRef> vers;
    std::string su;              // copy suffix
    std::vector<int> copy_path;  // enclosing copy indices
  };

  ExprRef tru() { return pool_.bool_const(true); }
  ExprRef fls() { return pool_.bool_const(false); }

  ExprRef conj2(ExprRef a, ExprRef b) {
    if (a == tru()) return b;
    if (b == tru()) return a;
    return pool_.land(a, b);
  }

  void assert_once(ExprRef e) {
    if (!emitted_.insert(e->id).second) return;
    solver_.assert_expr(e);
    constraints_.push_back(e);
  }

  std::string nm(const std::string& base, int idx, const std::string& su) {
    return base + "#" + std::to_string(idx) + su;
  }

  void walk_program() {
    Ctx ctx;
    ctx.guard = pool_.var("guard#0", BvType::boolean());
    entry_guard_ = ctx.guard;
    ctx.pending = tru();
    assert_once(pool_.eq(ctx.guard, tru()));
    for (const auto& d : prog_.decls) {
      ExprRef v0 = pool_.var(d.name + "#0", d.type);
      ctx.vers[d.name] = v0;
      init_vers_[d.name] = v0;
      if (d.init) assert_once(pool_.eq(v0, convert(*d.init, ctx, "")));
    }
    encode_block(prog_.body, ctx);
  }

  ExprRef convert(const AExpr& e, Ctx& ctx, const std::string& tag) {
    switch (e.kind) {
      case AExpr::Kind::Num: return pool_.constant(BvConst(e.type, e.num));
      case AExpr::Kind::Var: return ctx.vers.at(e.name);
      case AExpr::Kind::Nondet:
        return pool_.var(nondet_name(numbering_.nondet_occ.at(&e), tag, ctx.su), e.type);
      case AExpr::Kind::Un: {
        ExprRef a = convert(*e.a, ctx, tag);
        switch (e.un) {
          case UnOp::Neg: return pool_.neg(a);
          case UnOp::BitNot: return pool_.bit_not(a);
          case UnOp::LogNot: return pool_.lnot(a);
        }
        break;
      }
      case AExpr::Kind::Bin: {
        ExprRef a = convert(*e.a, ctx, tag);
        ExprRef b = convert(*e.b, ctx, tag);
        switch (e.bin) {
          case BinOp::Add: return pool_.add(a, b);
          case BinOp::Sub: return pool_.sub(a, b);
          case BinOp::Mul: return pool_.mul(a, b);
          case BinOp::Div: return pool_.div(a, b);
          case BinOp::Mod: return pool_.mod(a, b);
          case BinOp::BitAnd: return pool_.bit_and(a, b);
          case BinOp::BitOr: return pool_.bit_or(a, b);
          case BinOp::BitXor: return pool_.bit_xor(a, b);
          case BinOp::Shl: return pool_.shl(a, b);
          case BinOp::Shr:
            return a->type.is_signed() ? pool_.ashr(a, b) : pool_.lshr(a, b);
          case BinOp::Eq: return pool_.eq(a, b);
          case BinOp::Ne: return pool_.ne(a, b);
          case BinOp::Lt: return pool_.lt(a, b);
          case BinOp::Le: return pool_.le(a, b);
          case BinOp::Gt: return pool_.gt(a, b);
          case BinOp::Ge: return pool_.ge(a, b);
          case BinOp::LAnd: return pool_.land(a, b);
          case BinOp::LOr: return pool_.lor(a, b);
        }
        break;
      }
      case AExpr::Kind::Cond:
        return pool_.ite(convert(*e.a, ctx, tag), convert(*e.b, ctx, tag),
                         convert(*e.c, ctx, tag));
    }
    throw std::logic_error("convert: malformed expression");
  }

  void encode_block(const std::vector<StmtPtr>& body, Ctx& ctx) {
    for (const auto& s : body) encode_stmt(*s, ctx);
  }

  void encode_stmt(const Stmt& s, Ctx& ctx) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        ExprRef rhs = convert(*s.expr, ctx, "");
        ExprRef def = pool_.var(nm(s.lhs, numbering_.def_idx.at(&s), ctx.su),
                                rhs->type);
        assert_once(pool_.eq(def, rhs));
        ctx.vers[s.lhs] = def;
        break;
      }
      case Stmt::Kind::Assert: {
        ExprRef prop = convert(*s.expr, ctx, "");
        ExprRef g = conj2(ctx.guard, ctx.pending);
        bool frontier = true;
        for (int c : ctx.copy_path)
          if (c != 0) frontier = false;
        record_assert(AssertInfo{g, prop, &s, frontier});
        break;
      }
      case Stmt::Kind::Assume:
        ctx.pending = conj2(ctx.pending, convert(*s.expr, ctx, ""));
        break;
      case Stmt::Kind::If: encode_if(s, ctx); break;
      case Stmt::Kind::While: encode_loop(s, ctx); break;
    }
  }

  void record_assert(AssertInfo info) {
    uint64_t key = pool_.implies(info.guard, info.prop)->id;
    if (!assert_seen_.insert(key).second) return;
    asserts_.push_back(std::move(info));
  }

  void encode_if(const Stmt& s, Ctx& ctx) {
    const auto& info = numbering_.ifs.at(&s);
    ExprRef cond = convert(*s.expr, ctx, "");
    ExprRef base = conj2(ctx.guard, ctx.pending);
    ctx.guard = base;
    ctx.pending = tru();

    ExprRef tg = pool_.var(nm("guard", info.then_idx, ctx.su), BvType::boolean());
    assert_once(pool_.eq(tg, pool_.land(cond, base)));
    Ctx then_ctx = ctx;
    then_ctx.guard = tg;
    encode_block(s.body, then_ctx);

    Ctx else_ctx = ctx;
    if (!s.els.empty()) {
      ExprRef eg = pool_.var(nm("guard", info.else_idx, ctx.su), BvType::boolean());
      assert_once(pool_.eq(eg, pool_.land(pool_.lnot(cond), base)));
      else_ctx.guard = eg;
      encode_block(s.els, else_ctx);
    }

    for (const auto& v : info.join_vars) {
      ExprRef tv = then_ctx.vers.at(v), ev = else_ctx.vers.at(v);
      ExprRef phi = pool_.var(v + "#phi" + std::to_string(info.phi_idx) + ctx.su,
                              tv->type);
      assert_once(pool_.eq(phi, pool_.ite(tg, tv, ev)));
      ctx.vers[v] = phi;
    }
    if (then_ctx.pending != tru() || else_ctx.pending != tru())
      ctx.pending = pool_.ite(tg, then_ctx.pending, else_ctx.pending);
  }

  void encode_loop(const Stmt& s, Ctx& ctx) {
    const auto& info = numbering_.loops.at(&s);
    std::string key = ctx.su + "@" + std::to_string(info.head);
    LoopInstanceInfo* li;
    auto it = instances_.find(key);
    if (it == instances_.end()) {
      auto owned = std::make_unique<LoopInstanceInfo>();
      li = owned.get();
      li->stmt = &s;
      li->ctx = ctx.su;
      li->birth_round = round_;
      li->g_in = conj2(ctx.guard, ctx.pending);
      for (const auto& v : info.loop_vars) {
        li->xin[v] = ctx.vers.at(v);
        li->lb[v] = pool_.var(v + "#lb" + std::to_string(info.cut) + ctx.su,
                              ctx.vers.at(v)->type);
      }
      instances_.emplace(key, std::move(owned));
      instance_order_.push_back(li);
    } else {
      li = it->second.get();
    }
    ctx.pending = tru();

    // copy 0 of a top-level loop keeps plain names; nested instances always
    // carry their index so suffixes stay uniquely decodable
    auto suffix = [&](int u) {
      return u == 0 && ctx.su.empty() ? ctx.su : ctx.su + "%" + std::to_string(u);
    };

    // every instance is kept at the same depth: copies 0..round
    int old_copies = li->copies;
    while (li->copies <= round_) {
      int u = li->copies;
      std::string su = suffix(u);
      li->ls.push_back(pool_.var("guard#ls" + std::to_string(info.cut) + su,
                                 BvType::boolean()));
      li->head_guards.push_back(pool_.var(nm("guard", info.head, su), BvType::boolean()));
      li->body_guards.push_back(pool_.var(nm("guard", info.body, su), BvType::boolean()));
      std::map<std::string, ExprRef> phi;
      for (const auto& v : info.loop_vars)
        phi[v] = pool_.var(v + "#phi" + std::to_string(info.head) + su,
                           li->xin.at(v)->type);
      li->phis.push_back(phi);

      // head versions: loop vars through phi, the rest pass through
      Ctx head_ctx;
      head_ctx.guard = li->head_guards[u];
      head_ctx.pending = tru();
      head_ctx.vers = ctx.vers;
      for (const auto& [v, e] : phi) head_ctx.vers[v] = e;
      head_ctx.su = su;
      head_ctx.copy_path = ctx.copy_path;
      head_ctx.copy_path.push_back(u);

      ExprRef cond = convert(*s.expr, head_ctx, "");
      li->conds.push_back(cond);
      assert_once(pool_.eq(li->body_guards[u], pool_.land(cond, li->head_guards[u])));
      li->exit_exprs.push_back(pool_.land(pool_.lnot(cond), li->head_guards[u]));

      Ctx body_ctx = head_ctx;
      body_ctx.guard = li->body_guards[u];
      encode_block(s.body, body_ctx);
      li->ends.push_back(body_ctx.vers);
      // reachability at the end of the body; differs from the body guard when
      // the body ends in a nested loop (its exit merge) or leaves assumes
      li->end_guards.push_back(conj2(body_ctx.guard, body_ctx.pending));

      if (u > 0) emit_stitch(*li, info, u - 1);
      li->copies++;
    }

    // bodies of pre-existing copies are walked again so that nested instances
    // inside them are extended for this round; the memo skips everything
    // already emitted
    for (int u = old_copies - 1; u >= 0; --u) {
      Ctx body_ctx;
      body_ctx.guard = li->body_guards[u];
      body_ctx.pending = tru();
      body_ctx.vers = ctx.vers;
      for (const auto& [v, e] : li->phis[u]) body_ctx.vers[v] = e;
      body_ctx.su = suffix(u);
      body_ctx.copy_path = ctx.copy_path;
      body_ctx.copy_path.push_back(u);
      encode_block(s.body, body_ctx);
    }

    // this round's binding of the topmost head
    if ((int)li->enables.size() <= round_ - li->birth_round) {
      ExprRef e = pool_.var("enable#" + std::to_string(enable_counter_++),
                            BvType::boolean());
      li->enables.push_back(e);
      int top = li->top();
      assert_once(pool_.implies(e, pool_.eq(li->head_guards[top], li->g_in)));
      for (const auto& v : info.loop_vars)
        assert_once(pool_.implies(
            e, pool_.eq(li->phis[top].at(v),
                        pool_.ite(li->ls[top], li->lb.at(v), li->xin.at(v)))));
      assert_once(pool_.implies(e, pool_.eq(rest_guard(*li, info, top), fls())));
      for (const auto& v : info.loop_vars)
        assert_once(pool_.implies(
            e, pool_.eq(rest_var(*li, info, v, top), li->lb.at(v))));
    }

    // exit merge, emitted once; the post-loop code keeps stable names
    if (li->g_out == nullptr) {
      Ctx cut_ctx;
      cut_ctx.guard = li->end_guards[0];
      cut_ctx.pending = tru();
      cut_ctx.vers = ctx.vers;
      for (const auto& [v, e] : li->ends[0]) cut_ctx.vers[v] = e;
      cut_ctx.su = suffix(0);
      li->cond_cut = convert(*s.expr, cut_ctx, "c");
      li->exit_b = pool_.land(pool_.lnot(li->cond_cut), li->end_guards[0]);
      li->g_out = pool_.var(nm("guard", info.exit, ctx.su), BvType::boolean());
      assert_once(pool_.eq(
          li->g_out,
          pool_.lor(li->exit_b,
                    pool_.lor(li->exit_exprs[0], rest_guard(*li, info, 0)))));
      for (const auto& v : info.loop_vars) {
        ExprRef out = pool_.var(v + "#phi" + std::to_string(info.exit) + ctx.su,
                                li->xin.at(v)->type);
        assert_once(pool_.eq(
            out, pool_.ite(li->exit_b, li->ends[0].at(v),
                           pool_.ite(li->exit_exprs[0], li->phis[0].at(v),
                                     rest_var(*li, info, v, 0)))));
        li->outs[v] = out;
      }
    }

    for (const auto& v : info.loop_vars) ctx.vers[v] = li->outs.at(v);
    ctx.guard = li->g_out;
  }

  static std::string copy_suffix(const std::string& ctx, int u) {
    return u == 0 && ctx.empty() ? ctx : ctx + "%" + std::to_string(u);
  }

  ExprRef rest_guard(LoopInstanceInfo& li, const NodeNumbering::LoopInfo& info, int u) {
    return pool_.var("guard#rest" + std::to_string(info.exit) + copy_suffix(li.ctx, u),
                     BvType::boolean());
  }
  ExprRef rest_var(LoopInstanceInfo& li, const NodeNumbering::LoopInfo& info,
                   const std::string& v, int u) {
    return pool_.var(v + "#rest" + std::to_string(info.exit) + copy_suffix(li.ctx, u),
                     li.xin.at(v)->type);
  }

  // permanent connection of copy u to the newly created copy u+1, which
  // executes just before it
  void emit_stitch(LoopInstanceInfo& li, const NodeNumbering::LoopInfo& info, int u) {
    int up = u + 1;
    assert_once(pool_.eq(li.head_guards[u],
                         pool_.ite(li.ls[u], li.end_guards[up], li.g_in)));
    for (const auto& v : info.loop_vars)
      assert_once(pool_.eq(li.phis[u].at(v),
                           pool_.ite(li.ls[u], li.ends[up].at(v), li.xin.at(v))));
    assert_once(pool_.eq(rest_guard(li, info, u),
                         pool_.lor(li.exit_exprs[up], rest_guard(li, info, up))));
    for (const auto& v : info.loop_vars)
      assert_once(pool_.eq(rest_var(li, info, v, u),
                           pool_.ite(li.exit_exprs[up], li.phis[up].at(v),
                                     rest_var(li, info, v, up))));
  }

  const Program& prog_;
  BvSolver& solver_;
  ExprPool& pool_;
  NodeNumbering numbering_;
  int round_ = -1;
  int enable_counter_ = 0;
  ExprRef entry_guard_ = nullptr;
  std::map<std::string, ExprRef> init_vers_;
  std::map<std::string, std::unique_ptr<LoopInstanceInfo>> instances_;
  std::vector<LoopInstanceInfo*> instance_order_;
  std::vector<AssertInfo> asserts_;
  std::unordered_set<uint64_t> assert_seen_;
  std::vector<ExprRef> constraints_;
  std::unordered_set<uint64_t> emitted_;
};

// ---- copy-aware concrete execution ------------------------------------------

/*
 * Runs a program concretely while tracking which unwinding copy each step
 * belongs to: iteration j of a loop instance executes at copy round-j, the
 * chain the solver sees when the topmost selector is forced off. Every
 * nondeterministic read, including the initial value of an uninitialized
 * declaration, is pulled through a callback keyed by the SSA variable name,
 * so one walker serves both directions: randomized runs checked against the
 * formula, and model values turned back into a replayable input sequence.
 */
class CopyWalker {
public:
  using NondetFn = std::function<BvConst(const std::string& name, const BvType& t)>;

  struct Result {
    ExecResult::Status status = ExecResult::Status::Finished;
    int line = 0, col = 0;            // failing assertion location
    bool overflow = false;            // a loop needed more copies than round+1
    Assignment env;                   // final variable values
    Assignment drawn;                 // SSA name -> value for every callback hit
    std::vector<BvConst> order;       // the same values in draw order
  };

  CopyWalker(const Program& p, const NodeNumbering& n, int round, NondetFn fn,
             uint64_t step_limit = 1'000'000)
      : p_(p), n_(n), round_(round), fn_(std::move(fn)), step_limit_(step_limit) {}

  Result run() {
    Result r;
    for (const auto& d : p_.decls) {
      BvConst v = d.init ? eval(*d.init, "", "", r) : draw(d.name + "#0", d.type, r);
      env_.insert_or_assign(d.name, v);
    }
    exec_block(p_.body, "", r);
    r.env = env_;
    return r;
  }

private:
  BvConst draw(const std::string& name, const BvType& t, Result& r) {
    BvConst v = fn_(name, t);
    r.drawn.insert_or_assign(name, v);
    r.order.push_back(v);
    return v;
  }

  BvConst eval(const AExpr& e, const std::string& su, const std::string& tag, Result& r) {
    switch (e.kind) {
      case AExpr::Kind::Num: return BvConst(e.type, e.num);
      case AExpr::Kind::Var: return env_.at(e.name);
      case AExpr::Kind::Nondet:
        return draw(nondet_name(n_.nondet_occ.at(&e), tag, su), e.type, r);
      case AExpr::Kind::Un: {
        BvConst a = eval(*e.a, su, tag, r);
        switch (e.un) {
          case UnOp::Neg: return bv_neg(a);
          case UnOp::BitNot: return bv_not(a);
          case UnOp::LogNot: return BvConst::bool_val(!a.is_true());
        }
        break;
      }
      case AExpr::Kind::Bin: {
        BvConst a = eval(*e.a, su, tag, r);
        if (e.bin == BinOp::LAnd) return a.is_true() ? eval(*e.b, su, tag, r) : a;
        if (e.bin == BinOp::LOr) return a.is_true() ? a : eval(*e.b, su, tag, r);
        BvConst b = eval(*e.b, su, tag, r);
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
        return eval(*e.a, su, tag, r).is_true() ? eval(*e.b, su, tag, r)
                                                : eval(*e.c, su, tag, r);
    }
    throw std::logic_error("walker eval: malformed expression");
  }

  static std::string su_for(const std::string& parent, int copy) {
    return copy == 0 && parent.empty() ? parent : parent + "%" + std::to_string(copy);
  }

  bool exec_block(const std::vector<StmtPtr>& body, const std::string& su, Result& r) {
    for (const auto& s : body)
      if (!exec(*s, su, r)) return false;
    return true;
  }

  bool exec(const Stmt& s, const std::string& su, Result& r) {
    if (++steps_ > step_limit_) {
      r.status = ExecResult::Status::StepLimit;
      return false;
    }
    switch (s.kind) {
      case Stmt::Kind::Assign:
        env_.insert_or_assign(s.lhs, eval(*s.expr, su, "", r));
        break;
      case Stmt::Kind::If:
        if (eval(*s.expr, su, "", r).is_true()) {
          if (!exec_block(s.body, su, r)) return false;
        } else {
          if (!exec_block(s.els, su, r)) return false;
        }
        break;
      case Stmt::Kind::While: {
        for (int j = 0;; ++j) {
          std::string csu;
          std::string ctag;
          if (j <= round_) {
            csu = su_for(su, round_ - j);
          } else if (j == round_ + 1) {
            // this evaluation lives at the body-end cut of the last copy
            csu = su_for(su, 0);
            ctag = "c";
          } else {
            r.overflow = true;
            return false;
          }
          if (!eval(*s.expr, csu, ctag, r).is_true()) break;
          if (j > round_) {
            r.overflow = true;
            return false;
          }
          if (!exec_block(s.body, su_for(su, round_ - j), r)) return false;
          if (steps_ > step_limit_) {
            r.status = ExecResult::Status::StepLimit;
            return false;
          }
        }
        break;
      }
      case Stmt::Kind::Assert:
        if (!eval(*s.expr, su, "", r).is_true()) {
          r.status = ExecResult::Status::AssertFailed;
          r.line = s.line;
          r.col = s.col;
          return false;
        }
        break;
      case Stmt::Kind::Assume:
        if (!eval(*s.expr, su, "", r).is_true()) {
          r.status = ExecResult::Status::AssumeStopped;
          return false;
        }
        break;
    }
    return true;
  }

  const Program& p_;
  const NodeNumbering& n_;
  int round_;
  NondetFn fn_;
  uint64_t step_limit_;
  uint64_t steps_ = 0;
  Assignment env_;
};

// ---- constraint replay ------------------------------------------------------

/*
 * Treats the emitted constraints as a definition sequence: with the free
 * variables pre-assigned in `env`, each equation (or enable-guarded equation
 * whose enable holds) defines its left-hand variable. Afterwards every
 * constraint is re-checked under the completed assignment. Returns the
 * constraints that do not hold; throws if a right-hand side refers to a
 * variable that is neither free nor previously defined, which would mean the
 * encoding is cyclic.
 */
inline std::vector<ExprRef> replay_constraints(const std::vector<ExprRef>& cs,
                                               Assignment& env) {
  // definitions may appear before the definitions they depend on (a stitch
  // defines a head that an earlier body copy already referenced), so iterate
  // to a fixpoint
  std::vector<ExprRef> todo(cs.begin(), cs.end());
  bool progress = true;
  while (progress && !todo.empty()) {
    progress = false;
    std::vector<ExprRef> keep;
    for (ExprRef c : todo) {
      ExprRef eq = c;
      if (c->op == Op::Implies) {
        ExprRef en = c->args[0];
        if (en->op != Op::Var) throw std::logic_error("replay: malformed guard");
        auto it = env.find(en->name);
        if (it == env.end()) {
          keep.push_back(c);
          continue;
        }
        if (!it->second.is_true()) {
          progress = true;
          continue;
        }
        eq = c->args[1];
      }
      if (eq->op != Op::Eq || eq->args[0]->op != Op::Var)
        throw std::logic_error("replay: constraint is not a definition");
      try {
        BvConst v = eval_expr(eq->args[1], env);
        env.emplace(eq->args[0]->name, v);  // first definition wins
        progress = true;
      } catch (const std::runtime_error&) {
        keep.push_back(c);
        continue;
      }
    }
    todo.swap(keep);
  }
  if (!todo.empty())
    throw std::runtime_error("replay: cyclic or underdefined encoding: " +
                             expr_str(todo.front()));
  std::vector<ExprRef> failed;
  for (ExprRef c : cs)
    if (!eval_expr(c, env).is_true()) failed.push_back(c);
  return failed;
}

inline void collect_vars(ExprRef e, std::map<std::string, ExprRef>& out) {
  if (e->op == Op::Var) {
    out.emplace(e->name, e);
    return;
  }
  for (ExprRef a : e->args) collect_vars(a, out);
}

/// Free-variable assignment that places a walked execution into the current
/// unwinding: every entered loop starts at its top copy, the loop-back values
/// are unused and zeroed, and off-path nondet reads default to zero.
inline Assignment concrete_assignment(const SsaEncoder& enc, const CopyWalker::Result& w) {
  Assignment env = w.drawn;
  for (auto* li : enc.instances()) {
    for (int u = 0; u < li->copies; ++u)
      env.emplace(li->ls[u]->name, BvConst::bool_val(u != li->top()));
    for (size_t i = 0; i < li->enables.size(); ++i)
      env.emplace(li->enables[i]->name, BvConst::bool_val(i + 1 == li->enables.size()));
    for (const auto& [v, e] : li->lb) env.emplace(e->name, BvConst(e->type, 0));
  }
  std::map<std::string, ExprRef> vars;
  for (ExprRef c : enc.constraints()) collect_vars(c, vars);
  for (const auto& a : enc.asserts()) {
    collect_vars(a.guard, vars);
    collect_vars(a.prop, vars);
  }
  for (const auto& [name, e] : vars)
    if (name.rfind("nondet#", 0) == 0 && !env.count(name))
      env.emplace(name, BvConst(e->type, 0));
  return env;
}

}  // namespace kiwi
