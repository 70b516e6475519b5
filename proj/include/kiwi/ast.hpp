/*
 * Typed AST of the input language: declarations, assignment, if/else, while,
 * assert, assume, nondeterministic inputs. Compound assignments and ++/--
 * are desugared by the parser; the AST only has plain assignment.
 */
#pragma once

#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "kiwi/bv.hpp"

namespace kiwi {

enum class UnOp { Neg, BitNot, LogNot };
enum class BinOp {
  Add, Sub, Mul, Div, Mod,
  BitAnd, BitOr, BitXor, Shl, Shr,
  Eq, Ne, Lt, Le, Gt, Ge,
  LAnd, LOr,
};

struct AExpr;
using AExprPtr = std::unique_ptr<AExpr>;

struct AExpr {
  enum class Kind { Num, Var, Nondet, Un, Bin, Cond };
  Kind kind;
  uint128 num = 0;          // Num: magnitude as written
  bool num_unsigned = false;  // Num: had a u/U suffix
  std::string name;         // Var
  UnOp un{};
  BinOp bin{};
  AExprPtr a, b, c;         // operands; Cond uses all three
  BvType type;              // filled in by the type checker
  int line = 0, col = 0;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind { Assign, If, While, Assert, Assume };
  Kind kind;
  std::string lhs;            // Assign
  AExprPtr expr;              // Assign rhs / condition / checked expression
  std::vector<StmtPtr> body;  // If then-branch, While body
  std::vector<StmtPtr> els;   // If else-branch
  int line = 0, col = 0;
};

struct Decl {
  std::string name;
  BvType type;
  AExprPtr init;  // absent means nondeterministic initial value
  int line = 0, col = 0;
};

struct Program {
  std::vector<Decl> decls;
  std::vector<StmtPtr> body;
  std::map<std::string, BvType> vars;
};

// ---- pretty printing --------------------------------------------------------

inline const char* binop_str(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::BitAnd: return "&";
    case BinOp::BitOr: return "|";
    case BinOp::BitXor: return "^";
    case BinOp::Shl: return "<<";
    case BinOp::Shr: return ">>";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::LAnd: return "&&";
    case BinOp::LOr: return "||";
  }
  return "?";
}

inline std::string type_keyword(const BvType& t) {
  if (t == BvType::s(32)) return "int";
  if (t == BvType::u(32)) return "unsigned";
  return t.str();
}

inline std::string aexpr_str(const AExpr& e) {
  auto wrap = [](const std::string& s) { return "(" + s + ")"; };
  switch (e.kind) {
    case AExpr::Kind::Num:
      return uint128_to_string(e.num) + (e.num_unsigned ? "u" : "");
    case AExpr::Kind::Var: return e.name;
    case AExpr::Kind::Nondet:
      return "__VERIFIER_nondet_" +
             (e.type == BvType::s(32) ? std::string("int")
              : e.type == BvType::u(32) ? std::string("uint")
                                        : e.type.str()) + "()";
    case AExpr::Kind::Un: {
      const char* op = e.un == UnOp::Neg ? "-" : e.un == UnOp::BitNot ? "~" : "!";
      return op + wrap(aexpr_str(*e.a));
    }
    case AExpr::Kind::Bin:
      return wrap(aexpr_str(*e.a)) + " " + binop_str(e.bin) + " " + wrap(aexpr_str(*e.b));
    case AExpr::Kind::Cond:
      return wrap(aexpr_str(*e.a)) + " ? " + wrap(aexpr_str(*e.b)) + " : " + wrap(aexpr_str(*e.c));
  }
  return "?";
}

inline void stmt_print(const Stmt& s, std::ostream& os, int indent);

inline void block_print(const std::vector<StmtPtr>& body, std::ostream& os, int indent) {
  for (const auto& s : body) stmt_print(*s, os, indent);
}

inline void stmt_print(const Stmt& s, std::ostream& os, int indent) {
  std::string pad(indent * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Assign:
      os << pad << s.lhs << " = " << aexpr_str(*s.expr) << ";\n";
      break;
    case Stmt::Kind::If:
      os << pad << "if (" << aexpr_str(*s.expr) << ") {\n";
      block_print(s.body, os, indent + 1);
      if (!s.els.empty()) {
        os << pad << "} else {\n";
        block_print(s.els, os, indent + 1);
      }
      os << pad << "}\n";
      break;
    case Stmt::Kind::While:
      os << pad << "while (" << aexpr_str(*s.expr) << ") {\n";
      block_print(s.body, os, indent + 1);
      os << pad << "}\n";
      break;
    case Stmt::Kind::Assert:
      os << pad << "assert(" << aexpr_str(*s.expr) << ");\n";
      break;
    case Stmt::Kind::Assume:
      os << pad << "__CPROVER_assume(" << aexpr_str(*s.expr) << ");\n";
      break;
  }
}

/// Canonical source form; parsing it again yields the same AST.
inline std::string program_str(const Program& p) {
  std::ostringstream os;
  os << "void main() {\n";
  for (const auto& d : p.decls) {
    os << "  " << type_keyword(d.type) << " " << d.name;
    if (d.init) os << " = " << aexpr_str(*d.init);
    os << ";\n";
  }
  block_print(p.body, os, 1);
  os << "}\n";
  return os.str();
}

}  // namespace kiwi
