#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rxl/errors.hpp"
#include "rxl/symbol.hpp"
#include "rxl/value.hpp"

namespace rxl {

enum class NodeKind : std::uint8_t {
  Program,
  VarDecl,
  SignalDecl,
  AlwaysStmt,
  Assign,
  Update,
  Member,
  Index,
  Ident,
  Call,
  FunctionLit,
  ObjectLit,
  ArrayLit,
  ClassDecl,
  If,
  While,
  ForOf,
  Return,
  Block,
  Literal,
  Binary,
  Unary,
  Label,
  ExprStmt,
  New,
  Conditional,
  Property,
  Comment,
};

const char* node_kind_name(NodeKind k);

enum class Op : std::uint8_t {
  None,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Lt,
  Le,
  Gt,
  Ge,
  Eq,
  Ne,
  StrictEq,
  StrictNe,
  And,
  Or,
  Not,
  Neg,
  Plus,
  Inc,
  Dec,
};

const char* op_text(Op op);

enum class LiteralKind : std::uint8_t { Nil, True, False, Number, String };

namespace flag {
inline constexpr std::uint16_t kArrow = 1 << 0;
inline constexpr std::uint16_t kExprBody = 1 << 1;
inline constexpr std::uint16_t kMethod = 1 << 2;
inline constexpr std::uint16_t kDeclaration = 1 << 3;
inline constexpr std::uint16_t kPrefix = 1 << 4;
inline constexpr std::uint16_t kVar = 1 << 5;
inline constexpr std::uint16_t kConst = 1 << 6;
// Block that declares names and therefore gets its own scope at runtime.
inline constexpr std::uint16_t kScoped = 1 << 7;
inline constexpr std::uint16_t kAexprSite = 1 << 8;
}  // namespace flag

struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  SourcePos pos() const noexcept { return {line, column}; }
};

struct Node {
  NodeKind kind = NodeKind::Program;
  Op op = Op::None;
  LiteralKind literal = LiteralKind::Nil;
  std::uint16_t flags = 0;
  std::uint32_t id = 0;
  Span span;
  Symbol symbol = 0;
  double number = 0;
  PropKey key;
  std::string text;
  std::vector<std::unique_ptr<Node>> children;
  // Call nodes of `aexpr(...)`: local names visible at the call site.
  std::vector<Symbol> locals;

  bool has(std::uint16_t f) const noexcept { return (flags & f) != 0; }
  Node& child(std::size_t i) const { return *children[i]; }
  std::size_t size() const noexcept { return children.size(); }
};

using NodePtr = std::unique_ptr<Node>;

struct Program {
  NodePtr root;
  std::shared_ptr<const std::string> source;
  // Carries the "use hooks" marker prologue.
  bool hooked = false;
  std::uint32_t node_count = 0;
};

using ProgramPtr = std::shared_ptr<const Program>;

// Nodes counted excluding comments.
std::size_t count_ast_nodes(const Node& root);
inline std::size_t count_ast_nodes(const Program& p) { return count_ast_nodes(*p.root); }

std::string dump_ast(const Node& root);
inline std::string dump_ast(const Program& p) { return dump_ast(*p.root); }

// RXL surface syntax.
std::string to_source(const Node& root);
inline std::string to_source(const Program& p) { return to_source(*p.root); }

std::string quote_string(const std::string& s);

// Deep copy, keeping ids and spans.
NodePtr clone(const Node& n);

}  // namespace rxl
