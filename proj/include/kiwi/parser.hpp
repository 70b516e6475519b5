/*
 * Lexer, recursive-descent parser and type checker for the input language.
 *
 * The accepted subset: one main function, declarations first, assignment,
 * if/else, while, assert, assume, nondet intrinsics. Compound assignment
 * and ++/-- are desugared. Binary operands must agree in type exactly;
 * integer literals adapt to the type of the other operand. Conditions of
 * arithmetic type are coerced via `!= 0`.
 */
#pragma once

#include <cctype>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kiwi/ast.hpp"

namespace kiwi {

enum class DiagCode { Syntax, UnknownIdentifier, Unsupported, Type };

inline const char* diag_code_str(DiagCode c) {
  switch (c) {
    case DiagCode::Syntax: return "syntax error";
    case DiagCode::UnknownIdentifier: return "unknown identifier";
    case DiagCode::Unsupported: return "unsupported construct";
    case DiagCode::Type: return "type error";
  }
  return "error";
}

class FrontendError : public std::runtime_error {
public:
  FrontendError(DiagCode code, const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) +
                           ": " + diag_code_str(code) + ": " + msg),
        code(code), line(line), col(col) {}
  DiagCode code;
  int line, col;
};

namespace detail {

struct Token {
  enum class Kind { Ident, Number, Punct, Eof };
  Kind kind;
  std::string text;
  uint128 num = 0;
  bool num_unsigned = false;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  const Token& peek2() {
    if (!have2_) { tok2_ = lex(); have2_ = true; }
    return tok2_;
  }
  Token next() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    if (have2_) { tok_ = tok2_; have2_ = false; }
    else tok_ = lex();
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw FrontendError(DiagCode::Syntax, msg, line_, col_);
  }

  int get() {
    if (pos_ >= src_.size()) return -1;
    char c = src_[pos_++];
    if (c == '\n') { line_++; col_ = 1; } else col_++;
    return (unsigned char)c;
  }
  int look(size_t off = 0) const {
    return pos_ + off < src_.size() ? (unsigned char)src_[pos_ + off] : -1;
  }

  void skip_space() {
    while (true) {
      int c = look();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { get(); continue; }
      if (c == '/' && look(1) == '/') {
        while (look() != -1 && look() != '\n') get();
        continue;
      }
      if (c == '/' && look(1) == '*') {
        get(); get();
        while (look() != -1 && !(look() == '*' && look(1) == '/')) get();
        if (look() == -1) fail("unterminated comment");
        get(); get();
        continue;
      }
      if (c == '#') {  // preprocessor lines are ignored
        while (look() != -1 && look() != '\n') get();
        continue;
      }
      break;
    }
  }

  Token lex() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    int c = look();
    if (c == -1) { t.kind = Token::Kind::Eof; return t; }
    if (isalpha(c) || c == '_') {
      std::string s;
      while (isalnum(look()) || look() == '_') s.push_back((char)get());
      t.kind = Token::Kind::Ident;
      t.text = s;
      return t;
    }
    if (isdigit(c)) {
      uint128 v = 0;
      if (c == '0' && (look(1) == 'x' || look(1) == 'X')) {
        get(); get();
        if (!isxdigit(look())) fail("bad hex literal");
        while (isxdigit(look())) {
          int d = get();
          v = v * 16 + (isdigit(d) ? d - '0' : (tolower(d) - 'a' + 10));
        }
      } else {
        while (isdigit(look())) v = v * 10 + (get() - '0');
      }
      t.kind = Token::Kind::Number;
      t.num = v;
      while (look() == 'u' || look() == 'U' || look() == 'l' || look() == 'L') {
        int s = get();
        if (s == 'u' || s == 'U') t.num_unsigned = true;
      }
      return t;
    }
    // punctuation, longest match first
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
                                "+=", "-=", "*=", "/=", "%=", "++", "--"};
    for (const char* p : two) {
      if (c == p[0] && look(1) == p[1]) {
        get(); get();
        t.kind = Token::Kind::Punct;
        t.text = p;
        return t;
      }
    }
    get();
    t.kind = Token::Kind::Punct;
    t.text = std::string(1, (char)c);
    return t;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_, tok2_;
  bool have2_ = false;
};

}  // namespace detail

class Parser {
public:
  static Program parse(const std::string& src) {
    Parser p(src);
    Program prog = p.parse_program();
    TypeChecker(prog).run();
    return prog;
  }

private:
  using Token = detail::Token;
  explicit Parser(const std::string& src) : lx_(src) {}

  [[noreturn]] void fail(DiagCode code, const std::string& msg) {
    const Token& t = lx_.peek();
    throw FrontendError(code, msg, t.line, t.col);
  }

  bool at_punct(const std::string& s) {
    return lx_.peek().kind == Token::Kind::Punct && lx_.peek().text == s;
  }
  bool at_ident(const std::string& s) {
    return lx_.peek().kind == Token::Kind::Ident && lx_.peek().text == s;
  }
  void expect_punct(const std::string& s) {
    if (!at_punct(s)) fail(DiagCode::Syntax, "expected '" + s + "'");
    lx_.next();
  }
  std::string expect_ident() {
    if (lx_.peek().kind != Token::Kind::Ident) fail(DiagCode::Syntax, "expected identifier");
    return lx_.next().text;
  }

  static std::optional<BvType> type_keyword_of(const std::string& s) {
    if (s == "int") return BvType::s(32);
    if (s == "unsigned") return BvType::u(32);
    if (s.size() >= 2 && (s[0] == 'i' || s[0] == 'u')) {
      std::string w = s.substr(1);
      if (w == "8" || w == "16" || w == "32" || w == "64")
        return s[0] == 'i' ? BvType::s(std::stoi(w)) : BvType::u(std::stoi(w));
    }
    return std::nullopt;
  }

  Program parse_program() {
    // optional extern declarations of nondet intrinsics are not supported;
    // the program is exactly one main function
    if (at_ident("void") || at_ident("int")) lx_.next();
    else fail(DiagCode::Syntax, "expected 'void main' or 'int main'");
    if (!at_ident("main")) fail(DiagCode::Unsupported, "only a main function is supported");
    lx_.next();
    expect_punct("(");
    if (at_ident("void")) lx_.next();
    expect_punct(")");
    expect_punct("{");
    Program prog;
    bool in_decls = true;
    while (!at_punct("}")) {
      if (lx_.peek().kind == Token::Kind::Eof) fail(DiagCode::Syntax, "unexpected end of input");
      if (lx_.peek().kind == Token::Kind::Ident) {
        auto t = type_keyword_of(lx_.peek().text);
        if (t) {
          if (!in_decls)
            fail(DiagCode::Unsupported, "declarations must precede statements");
          parse_decl(prog, *t);
          continue;
        }
        if (check_unsupported_keyword(lx_.peek().text)) continue;  // throws
      }
      if (at_ident("return")) {
        parse_return();
        if (!at_punct("}")) fail(DiagCode::Unsupported, "return before the end of main");
        break;
      }
      in_decls = false;
      parse_stmt(prog.body);
    }
    expect_punct("}");
    if (lx_.peek().kind != Token::Kind::Eof)
      fail(DiagCode::Unsupported, "only a single main function is supported");
    return prog;
  }

  bool check_unsupported_keyword(const std::string& s) {
    static const char* bad[] = {"for", "do", "break", "continue", "goto",
                                "switch", "char", "long", "short", "float",
                                "double", "extern", "static", "struct", "void"};
    for (const char* b : bad)
      if (s == b) fail(DiagCode::Unsupported, "'" + s + "' is not supported");
    return false;
  }

  void parse_return() {
    lx_.next();
    if (!at_punct(";")) {
      if (lx_.peek().kind != Token::Kind::Number)
        fail(DiagCode::Unsupported, "only 'return <constant>;' is supported");
      lx_.next();
    }
    expect_punct(";");
  }

  void parse_decl(Program& prog, BvType t) {
    int line = lx_.peek().line, col = lx_.peek().col;
    lx_.next();  // type keyword
    while (true) {
      if (at_punct("*")) fail(DiagCode::Unsupported, "pointers are not supported");
      Decl d;
      d.type = t;
      d.line = line;
      d.col = col;
      d.name = expect_ident();
      if (at_punct("[")) fail(DiagCode::Unsupported, "arrays are not supported");
      if (at_punct("=")) {
        lx_.next();
        d.init = parse_expr();
      }
      prog.decls.push_back(std::move(d));
      if (at_punct(",")) { lx_.next(); continue; }
      break;
    }
    expect_punct(";");
  }

  void parse_stmt(std::vector<StmtPtr>& out) {
    const Token& t = lx_.peek();
    if (at_punct(";")) { lx_.next(); return; }
    if (at_punct("{")) {
      lx_.next();
      while (!at_punct("}")) {
        if (lx_.peek().kind == Token::Kind::Eof) fail(DiagCode::Syntax, "unexpected end of input");
        parse_stmt(out);
      }
      lx_.next();
      return;
    }
    if (t.kind == Token::Kind::Ident) {
      check_unsupported_keyword(t.text);
      if (t.text == "if") { parse_if(out); return; }
      if (t.text == "while") { parse_while(out); return; }
      if (t.text == "assert") { parse_checked(out, Stmt::Kind::Assert); return; }
      if (t.text == "__CPROVER_assume" || t.text == "__VERIFIER_assume" || t.text == "assume") {
        parse_checked(out, Stmt::Kind::Assume);
        return;
      }
      if (type_keyword_of(t.text))
        fail(DiagCode::Unsupported, "declarations must precede statements");
      parse_assign(out);
      return;
    }
    if (at_punct("++") || at_punct("--")) { parse_assign(out); return; }
    fail(DiagCode::Syntax, "expected a statement");
  }

  void parse_if(std::vector<StmtPtr>& out) {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    s->line = lx_.peek().line;
    s->col = lx_.peek().col;
    lx_.next();
    expect_punct("(");
    s->expr = parse_expr();
    expect_punct(")");
    parse_stmt(s->body);
    if (at_ident("else")) {
      lx_.next();
      parse_stmt(s->els);
    }
    out.push_back(std::move(s));
  }

  void parse_while(std::vector<StmtPtr>& out) {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::While;
    s->line = lx_.peek().line;
    s->col = lx_.peek().col;
    lx_.next();
    expect_punct("(");
    s->expr = parse_expr();
    expect_punct(")");
    parse_stmt(s->body);
    out.push_back(std::move(s));
  }

  void parse_checked(std::vector<StmtPtr>& out, Stmt::Kind kind) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->line = lx_.peek().line;
    s->col = lx_.peek().col;
    lx_.next();
    expect_punct("(");
    s->expr = parse_expr();
    expect_punct(")");
    expect_punct(";");
    out.push_back(std::move(s));
  }

  AExprPtr var_ref(const std::string& name, int line, int col) {
    auto e = std::make_unique<AExpr>();
    e->kind = AExpr::Kind::Var;
    e->name = name;
    e->line = line;
    e->col = col;
    return e;
  }
  AExprPtr one_lit(int line, int col) {
    auto e = std::make_unique<AExpr>();
    e->kind = AExpr::Kind::Num;
    e->num = 1;
    e->line = line;
    e->col = col;
    return e;
  }
  void emit_assign(std::vector<StmtPtr>& out, const std::string& lhs, AExprPtr rhs,
                   int line, int col) {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Assign;
    s->lhs = lhs;
    s->expr = std::move(rhs);
    s->line = line;
    s->col = col;
    out.push_back(std::move(s));
  }

  void parse_assign(std::vector<StmtPtr>& out) {
    int line = lx_.peek().line, col = lx_.peek().col;
    if (at_punct("++") || at_punct("--")) {  // prefix
      bool inc = lx_.next().text == "++";
      std::string name = expect_ident();
      expect_punct(";");
      auto rhs = std::make_unique<AExpr>();
      rhs->kind = AExpr::Kind::Bin;
      rhs->bin = inc ? BinOp::Add : BinOp::Sub;
      rhs->a = var_ref(name, line, col);
      rhs->b = one_lit(line, col);
      rhs->line = line;
      rhs->col = col;
      emit_assign(out, name, std::move(rhs), line, col);
      return;
    }
    std::string name = expect_ident();
    if (at_punct("++") || at_punct("--")) {  // postfix
      bool inc = lx_.next().text == "++";
      expect_punct(";");
      auto rhs = std::make_unique<AExpr>();
      rhs->kind = AExpr::Kind::Bin;
      rhs->bin = inc ? BinOp::Add : BinOp::Sub;
      rhs->a = var_ref(name, line, col);
      rhs->b = one_lit(line, col);
      rhs->line = line;
      rhs->col = col;
      emit_assign(out, name, std::move(rhs), line, col);
      return;
    }
    static const std::pair<const char*, BinOp> comp[] = {
        {"+=", BinOp::Add}, {"-=", BinOp::Sub}, {"*=", BinOp::Mul},
        {"/=", BinOp::Div}, {"%=", BinOp::Mod}};
    for (auto& [tok, op] : comp) {
      if (at_punct(tok)) {
        lx_.next();
        AExprPtr val = parse_expr();
        expect_punct(";");
        auto rhs = std::make_unique<AExpr>();
        rhs->kind = AExpr::Kind::Bin;
        rhs->bin = op;
        rhs->a = var_ref(name, line, col);
        rhs->b = std::move(val);
        rhs->line = line;
        rhs->col = col;
        emit_assign(out, name, std::move(rhs), line, col);
        return;
      }
    }
    expect_punct("=");
    // chained assignment: x = y = z = e
    std::vector<std::string> lhss{name};
    while (lx_.peek().kind == Token::Kind::Ident && lx_.peek2().kind == Token::Kind::Punct &&
           lx_.peek2().text == "=") {
      lhss.push_back(lx_.next().text);
      lx_.next();  // '='
    }
    AExprPtr rhs = parse_expr();
    expect_punct(";");
    // rightmost target gets the expression, the rest copy leftwards
    for (size_t i = lhss.size(); i-- > 0;) {
      if (i == lhss.size() - 1) {
        emit_assign(out, lhss[i], std::move(rhs), line, col);
      } else {
        emit_assign(out, lhss[i], var_ref(lhss[i + 1], line, col), line, col);
      }
    }
  }

  // ---- expressions, precedence climbing ----

  AExprPtr parse_expr() { return parse_cond(); }

  AExprPtr parse_cond() {
    AExprPtr c = parse_bin(0);
    if (!at_punct("?")) return c;
    int line = lx_.peek().line, col = lx_.peek().col;
    lx_.next();
    AExprPtr t = parse_expr();
    expect_punct(":");
    AExprPtr f = parse_cond();
    auto e = std::make_unique<AExpr>();
    e->kind = AExpr::Kind::Cond;
    e->a = std::move(c);
    e->b = std::move(t);
    e->c = std::move(f);
    e->line = line;
    e->col = col;
    return e;
  }

  struct OpLevel { const char* tok; BinOp op; int prec; };
  static const OpLevel* op_table() {
    static const OpLevel t[] = {
        {"||", BinOp::LOr, 1},
        {"&&", BinOp::LAnd, 2},
        {"|", BinOp::BitOr, 3},
        {"^", BinOp::BitXor, 4},
        {"&", BinOp::BitAnd, 5},
        {"==", BinOp::Eq, 6}, {"!=", BinOp::Ne, 6},
        {"<", BinOp::Lt, 7}, {"<=", BinOp::Le, 7},
        {">", BinOp::Gt, 7}, {">=", BinOp::Ge, 7},
        {"<<", BinOp::Shl, 8}, {">>", BinOp::Shr, 8},
        {"+", BinOp::Add, 9}, {"-", BinOp::Sub, 9},
        {"*", BinOp::Mul, 10}, {"/", BinOp::Div, 10}, {"%", BinOp::Mod, 10},
        {nullptr, BinOp::Add, 0}};
    return t;
  }

  std::optional<OpLevel> peek_binop(int min_prec) {
    if (lx_.peek().kind != Token::Kind::Punct) return std::nullopt;
    for (const OpLevel* p = op_table(); p->tok; ++p)
      if (lx_.peek().text == p->tok && p->prec >= min_prec) return *p;
    return std::nullopt;
  }

  AExprPtr parse_bin(int min_prec) {
    AExprPtr lhs = parse_unary();
    while (auto op = peek_binop(min_prec)) {
      int line = lx_.peek().line, col = lx_.peek().col;
      lx_.next();
      AExprPtr rhs = parse_bin(op->prec + 1);
      auto e = std::make_unique<AExpr>();
      e->kind = AExpr::Kind::Bin;
      e->bin = op->op;
      e->a = std::move(lhs);
      e->b = std::move(rhs);
      e->line = line;
      e->col = col;
      lhs = std::move(e);
    }
    return lhs;
  }

  AExprPtr parse_unary() {
    int line = lx_.peek().line, col = lx_.peek().col;
    if (at_punct("-") || at_punct("~") || at_punct("!")) {
      std::string op = lx_.next().text;
      auto e = std::make_unique<AExpr>();
      e->kind = AExpr::Kind::Un;
      e->un = op == "-" ? UnOp::Neg : op == "~" ? UnOp::BitNot : UnOp::LogNot;
      e->a = parse_unary();
      e->line = line;
      e->col = col;
      return e;
    }
    if (at_punct("+")) { lx_.next(); return parse_unary(); }
    return parse_primary();
  }

  static std::optional<BvType> nondet_type_of(const std::string& name) {
    const std::string prefix = "__VERIFIER_nondet_";
    if (name.rfind(prefix, 0) != 0) return std::nullopt;
    std::string t = name.substr(prefix.size());
    if (t == "int") return BvType::s(32);
    if (t == "uint" || t == "unsigned") return BvType::u(32);
    return Parser::type_keyword_of(t);
  }

  AExprPtr parse_primary() {
    const Token& t = lx_.peek();
    int line = t.line, col = t.col;
    if (at_punct("(")) {
      lx_.next();
      AExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Token::Kind::Number) {
      Token n = lx_.next();
      auto e = std::make_unique<AExpr>();
      e->kind = AExpr::Kind::Num;
      e->num = n.num;
      e->num_unsigned = n.num_unsigned;
      e->line = line;
      e->col = col;
      return e;
    }
    if (t.kind == Token::Kind::Ident) {
      if (auto nt = nondet_type_of(t.text)) {
        lx_.next();
        expect_punct("(");
        expect_punct(")");
        auto e = std::make_unique<AExpr>();
        e->kind = AExpr::Kind::Nondet;
        e->type = *nt;
        e->line = line;
        e->col = col;
        return e;
      }
      std::string name = lx_.next().text;
      if (at_punct("("))
        fail(DiagCode::Unsupported, "function call '" + name + "' is not supported");
      if (at_punct("[")) fail(DiagCode::Unsupported, "arrays are not supported");
      return var_ref(name, line, col);
    }
    fail(DiagCode::Syntax, "expected an expression");
  }

  detail::Lexer lx_;

  // ---- type checking --------------------------------------------------------

  class TypeChecker {
  public:
    explicit TypeChecker(Program& p) : p_(p) {}

    void run() {
      for (auto& d : p_.decls) {
        if (p_.vars.count(d.name))
          throw FrontendError(DiagCode::Type, "redeclaration of '" + d.name + "'",
                              d.line, d.col);
        if (d.init) check(*d.init, d.type);
        p_.vars.emplace(d.name, d.type);
      }
      check_block(p_.body);
    }

  private:
    [[noreturn]] void fail(DiagCode code, const std::string& msg, const AExpr& at) {
      throw FrontendError(code, msg, at.line, at.col);
    }

    void check_block(std::vector<StmtPtr>& body) {
      for (auto& s : body) check_stmt(*s);
    }

    void check_stmt(Stmt& s) {
      switch (s.kind) {
        case Stmt::Kind::Assign: {
          auto it = p_.vars.find(s.lhs);
          if (it == p_.vars.end())
            throw FrontendError(DiagCode::UnknownIdentifier,
                                "assignment to undeclared '" + s.lhs + "'", s.line, s.col);
          check(*s.expr, it->second);
          break;
        }
        case Stmt::Kind::If:
        case Stmt::Kind::While:
          coerce_condition(s.expr);
          check_block(s.body);
          check_block(s.els);
          break;
        case Stmt::Kind::Assert:
        case Stmt::Kind::Assume:
          coerce_condition(s.expr);
          break;
      }
    }

    /// Types `e`, requiring the result to be exactly `want` when given.
    BvType check(AExpr& e, std::optional<BvType> want) {
      BvType t = infer(e, want);
      if (want && !(t == *want)) {
        fail(DiagCode::Type,
             "expected " + want->str() + ", got " + t.str(), e);
      }
      return t;
    }

    BvType infer(AExpr& e, std::optional<BvType> want) {
      switch (e.kind) {
        case AExpr::Kind::Num: {
          BvType t = want && !want->is_bool()
                         ? *want
                         : (e.num_unsigned ? BvType::u(32) : BvType::s(32));
          if (t.width < 128 && e.num > mask_of(t.width))
            fail(DiagCode::Type, "literal does not fit in " + t.str(), e);
          e.type = t;
          return t;
        }
        case AExpr::Kind::Var: {
          auto it = p_.vars.find(e.name);
          if (it == p_.vars.end())
            fail(DiagCode::UnknownIdentifier, "'" + e.name + "'", e);
          e.type = it->second;
          return e.type;
        }
        case AExpr::Kind::Nondet:
          return e.type;  // fixed by the intrinsic name
        case AExpr::Kind::Un: {
          if (e.un == UnOp::LogNot) {
            coerce_condition(e.a);
            e.type = BvType::boolean();
            return e.type;
          }
          BvType t = check(*e.a, want);
          if (t.is_bool()) fail(DiagCode::Type, "arithmetic on a boolean", e);
          e.type = t;
          return t;
        }
        case AExpr::Kind::Bin: return infer_bin(e, want);
        case AExpr::Kind::Cond: {
          coerce_condition(e.a);
          BvType t = binary_operands(e, *e.b, *e.c, want);
          e.type = t;
          return t;
        }
      }
      fail(DiagCode::Type, "unreachable", e);
    }

    /// Types two operands that must agree; literals adapt to the other side.
    BvType binary_operands(AExpr& at, AExpr& a, AExpr& b, std::optional<BvType> want) {
      bool alit = a.kind == AExpr::Kind::Num, blit = b.kind == AExpr::Kind::Num;
      if (alit && !blit) {
        BvType t = infer(b, want);
        if (t.is_bool()) fail(DiagCode::Type, "arithmetic on a boolean", at);
        check(a, t);
        return t;
      }
      if (blit && !alit) {
        BvType t = infer(a, want);
        if (t.is_bool()) fail(DiagCode::Type, "arithmetic on a boolean", at);
        check(b, t);
        return t;
      }
      BvType ta = infer(a, want);
      if (ta.is_bool()) fail(DiagCode::Type, "arithmetic on a boolean", at);
      check(b, ta);
      return ta;
    }

    BvType infer_bin(AExpr& e, std::optional<BvType> want) {
      switch (e.bin) {
        case BinOp::LAnd:
        case BinOp::LOr:
          coerce_condition(e.a);
          coerce_condition(e.b);
          e.type = BvType::boolean();
          return e.type;
        case BinOp::Eq: case BinOp::Ne:
        case BinOp::Lt: case BinOp::Le:
        case BinOp::Gt: case BinOp::Ge: {
          binary_operands(e, *e.a, *e.b, std::nullopt);
          e.type = BvType::boolean();
          return e.type;
        }
        default: {
          BvType t = binary_operands(e, *e.a, *e.b, want);
          e.type = t;
          return t;
        }
      }
    }

    /// Conditions of arithmetic type become `e != 0`.
    void coerce_condition(AExprPtr& e) {
      BvType t = infer(*e, std::nullopt);
      if (t.is_bool()) return;
      auto zero = std::make_unique<AExpr>();
      zero->kind = AExpr::Kind::Num;
      zero->num = 0;
      zero->type = t;
      zero->line = e->line;
      zero->col = e->col;
      auto ne = std::make_unique<AExpr>();
      ne->kind = AExpr::Kind::Bin;
      ne->bin = BinOp::Ne;
      ne->a = std::move(e);
      ne->b = std::move(zero);
      ne->type = BvType::boolean();
      ne->line = ne->a->line;
      ne->col = ne->a->col;
      e = std::move(ne);
    }

    Program& p_;
  };
};

/// Convenience entry point.
inline Program parse_program(const std::string& src) { return Parser::parse(src); }

}  // namespace kiwi
