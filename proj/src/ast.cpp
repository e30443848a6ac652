#include "rxl/ast.hpp"

#include <cctype>

namespace rxl {

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Program: return "Program";
    case NodeKind::VarDecl: return "VarDecl";
    case NodeKind::SignalDecl: return "SignalDecl";
    case NodeKind::AlwaysStmt: return "AlwaysStmt";
    case NodeKind::Assign: return "Assign";
    case NodeKind::Update: return "Update";
    case NodeKind::Member: return "Member";
    case NodeKind::Index: return "Index";
    case NodeKind::Ident: return "Ident";
    case NodeKind::Call: return "Call";
    case NodeKind::FunctionLit: return "FunctionLit";
    case NodeKind::ObjectLit: return "ObjectLit";
    case NodeKind::ArrayLit: return "ArrayLit";
    case NodeKind::ClassDecl: return "ClassDecl";
    case NodeKind::If: return "If";
    case NodeKind::While: return "While";
    case NodeKind::ForOf: return "ForOf";
    case NodeKind::Return: return "Return";
    case NodeKind::Block: return "Block";
    case NodeKind::Literal: return "Literal";
    case NodeKind::Binary: return "Binary";
    case NodeKind::Unary: return "Unary";
    case NodeKind::Label: return "Label";
    case NodeKind::ExprStmt: return "ExprStmt";
    case NodeKind::New: return "New";
    case NodeKind::Conditional: return "Conditional";
    case NodeKind::Property: return "Property";
    case NodeKind::Comment: return "Comment";
  }
  return "?";
}

const char* op_text(Op op) {
  switch (op) {
    case Op::None: return "=";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::StrictEq: return "===";
    case Op::StrictNe: return "!==";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Not: return "!";
    case Op::Neg: return "-";
    case Op::Plus: return "+";
    case Op::Inc: return "++";
    case Op::Dec: return "--";
  }
  return "?";
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

namespace {

std::string literal_text(const Node& n) {
  switch (n.literal) {
    case LiteralKind::Nil: return "nil";
    case LiteralKind::True: return "true";
    case LiteralKind::False: return "false";
    case LiteralKind::Number: return number_to_string(n.number);
    case LiteralKind::String: return quote_string(symbol_text(n.symbol));
  }
  return "?";
}

const char* decl_keyword(const Node& n) {
  if (n.has(flag::kVar)) return "var";
  if (n.has(flag::kConst)) return "const";
  return "let";
}

std::size_t count_rec(const Node& n) {
  if (n.kind == NodeKind::Comment) return 0;
  std::size_t c = 1;
  for (auto& ch : n.children) c += count_rec(*ch);
  return c;
}

void dump_rec(const Node& n, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(depth) * 2, ' ');
  out += '(';
  out += node_kind_name(n.kind);
  switch (n.kind) {
    case NodeKind::VarDecl: out += ' '; out += decl_keyword(n); break;
    case NodeKind::Ident:
    case NodeKind::SignalDecl:
    case NodeKind::ClassDecl:
    case NodeKind::Property:
    case NodeKind::Label:
    case NodeKind::ForOf:
      out += ' ';
      out += symbol_text(n.symbol);
      break;
    case NodeKind::Member: out += ' '; out += n.key.text(); break;
    case NodeKind::Literal: out += ' '; out += literal_text(n); break;
    case NodeKind::Binary:
    case NodeKind::Unary: out += ' '; out += op_text(n.op); break;
    case NodeKind::Assign:
      out += ' ';
      if (n.op != Op::None) out += op_text(n.op);
      out += '=';
      break;
    case NodeKind::Update:
      out += ' ';
      out += op_text(n.op);
      out += n.has(flag::kPrefix) ? " prefix" : " postfix";
      break;
    case NodeKind::FunctionLit:
      if (n.symbol) {
        out += ' ';
        out += symbol_text(n.symbol);
      }
      if (n.has(flag::kArrow)) out += " arrow";
      break;
    case NodeKind::Comment: out += ' '; out += quote_string(n.text); break;
    default: break;
  }
  for (auto& ch : n.children) {
    out += '\n';
    dump_rec(*ch, depth + 1, out);
  }
  out += ')';
}

// Binding power for the printer; higher binds tighter.
int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Assign: return 1;
    case NodeKind::FunctionLit: return n.has(flag::kArrow) ? 1 : 20;
    case NodeKind::Conditional: return 2;
    case NodeKind::Binary:
      switch (n.op) {
        case Op::Or: return 3;
        case Op::And: return 4;
        case Op::Eq:
        case Op::Ne:
        case Op::StrictEq:
        case Op::StrictNe: return 5;
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: return 6;
        case Op::Add:
        case Op::Sub: return 7;
        default: return 8;
      }
    case NodeKind::Unary: return 9;
    case NodeKind::Update: return n.has(flag::kPrefix) ? 9 : 10;
    case NodeKind::New: return 11;
    case NodeKind::Call:
    case NodeKind::Member:
    case NodeKind::Index: return 12;
    default: return 20;
  }
}

class Printer {
 public:
  std::string run(const Node& root) {
    if (root.kind == NodeKind::Program) {
      for (auto& s : root.children) stmt(*s, 0);
    } else if (is_statement(root)) {
      stmt(root, 0);
    } else {
      expr(root, 0);
    }
    return out_;
  }

 private:
  static bool is_statement(const Node& n) {
    switch (n.kind) {
      case NodeKind::VarDecl:
      case NodeKind::SignalDecl:
      case NodeKind::AlwaysStmt:
      case NodeKind::ClassDecl:
      case NodeKind::If:
      case NodeKind::While:
      case NodeKind::ForOf:
      case NodeKind::Return:
      case NodeKind::Block:
      case NodeKind::Label:
      case NodeKind::ExprStmt:
      case NodeKind::Comment: return true;
      case NodeKind::FunctionLit: return n.has(flag::kDeclaration);
      default: return false;
    }
  }

  void indent(int d) { out_.append(static_cast<std::size_t>(d) * 2, ' '); }

  void block_body(const Node& block, int d) {
    out_ += "{\n";
    for (auto& s : block.children) stmt(*s, d + 1);
    indent(d);
    out_ += '}';
  }

  void stmt_or_block(const Node& n, int d) {
    if (n.kind == NodeKind::Block) {
      out_ += ' ';
      block_body(n, d);
    } else {
      out_ += '\n';
      stmt(n, d + 1);
      indent(d);
    }
  }

  void stmt(const Node& n, int d) {
    int saved = depth_hint_;
    depth_hint_ = d;
    stmt_inner(n, d);
    depth_hint_ = saved;
  }

  void stmt_inner(const Node& n, int d) {
    indent(d);
    switch (n.kind) {
      case NodeKind::VarDecl: {
        out_ += decl_keyword(n);
        out_ += ' ';
        for (std::size_t i = 0; i < n.size(); ++i) {
          if (i) out_ += ", ";
          const Node& id = n.child(i);
          out_ += symbol_text(id.symbol);
          if (id.size()) {
            out_ += " = ";
            expr(id.child(0), 2);
          }
        }
        out_ += ";\n";
        return;
      }
      case NodeKind::SignalDecl:
        out_ += "signal " + symbol_text(n.symbol) + " = ";
        expr(n.child(0), 2);
        out_ += ";\n";
        return;
      case NodeKind::AlwaysStmt:
        out_ += "always: ";
        expr(n.child(0), 0);
        out_ += ";\n";
        return;
      case NodeKind::ClassDecl:
        out_ += "class " + symbol_text(n.symbol) + " {\n";
        for (auto& m : n.children) {
          indent(d + 1);
          method(*m, d + 1);
          out_ += '\n';
        }
        indent(d);
        out_ += "}\n";
        return;
      case NodeKind::FunctionLit:
        function(n, d);
        out_ += '\n';
        return;
      case NodeKind::If: {
        const Node* cur = &n;
        while (true) {
          out_ += "if (";
          expr(cur->child(0), 0);
          out_ += ')';
          stmt_or_block(cur->child(1), d);
          if (cur->size() < 3) break;
          const Node& alt = cur->child(2);
          if (alt.kind == NodeKind::Block) {
            out_ += " else ";
            block_body(alt, d);
            break;
          }
          if (alt.kind == NodeKind::If) {
            out_ += " else ";
            cur = &alt;
            continue;
          }
          out_ += " else";
          stmt_or_block(alt, d);
          break;
        }
        out_ += '\n';
        return;
      }
      case NodeKind::While:
        out_ += "while (";
        expr(n.child(0), 0);
        out_ += ')';
        stmt_or_block(n.child(1), d);
        out_ += '\n';
        return;
      case NodeKind::ForOf:
        out_ += "for (let " + symbol_text(n.symbol) + " of ";
        expr(n.child(0), 0);
        out_ += ')';
        stmt_or_block(n.child(1), d);
        out_ += '\n';
        return;
      case NodeKind::Return:
        out_ += "return";
        if (n.size()) {
          out_ += ' ';
          expr(n.child(0), 0);
        }
        out_ += ";\n";
        return;
      case NodeKind::Block:
        block_body(n, d);
        out_ += '\n';
        return;
      case NodeKind::Label:
        out_ += symbol_text(n.symbol) + ":\n";
        stmt(n.child(0), d);
        return;
      case NodeKind::ExprStmt: {
        const Node& e = n.child(0);
        bool wrap = e.kind == NodeKind::ObjectLit ||
                    (e.kind == NodeKind::FunctionLit && !e.has(flag::kArrow));
        if (wrap) out_ += '(';
        expr(e, 0);
        if (wrap) out_ += ')';
        out_ += ";\n";
        return;
      }
      case NodeKind::Comment:
        out_ += n.text + "\n";
        return;
      default:
        expr(n, 0);
        out_ += ";\n";
        return;
    }
  }

  void params(const Node& fn) {
    out_ += '(';
    for (std::size_t i = 0; i + 1 < fn.size(); ++i) {
      if (i) out_ += ", ";
      out_ += symbol_text(fn.child(i).symbol);
    }
    out_ += ')';
  }

  void method(const Node& fn, int d) {
    out_ += symbol_text(fn.symbol);
    params(fn);
    out_ += ' ';
    block_body(*fn.children.back(), d);
  }

  void function(const Node& fn, int d) {
    const Node& body = *fn.children.back();
    if (fn.has(flag::kArrow)) {
      params(fn);
      out_ += " => ";
      if (fn.has(flag::kExprBody)) {
        bool wrap = body.kind == NodeKind::ObjectLit;
        if (wrap) out_ += '(';
        expr(body, 2);
        if (wrap) out_ += ')';
      } else {
        block_body(body, d);
      }
      return;
    }
    out_ += "function";
    if (fn.symbol) out_ += ' ' + symbol_text(fn.symbol);
    params(fn);
    out_ += ' ';
    block_body(body, d);
  }

  void args(const Node& n, std::size_t from) {
    out_ += '(';
    for (std::size_t i = from; i < n.size(); ++i) {
      if (i > from) out_ += ", ";
      expr(n.child(i), 2);
    }
    out_ += ')';
  }

  // Prints `n`, parenthesized when it binds looser than `min`.
  void expr(const Node& n, int min) {
    int p = precedence(n);
    bool paren = p < min;
    if (paren) out_ += '(';
    switch (n.kind) {
      case NodeKind::Literal: out_ += literal_text(n); break;
      case NodeKind::Ident: out_ += symbol_text(n.symbol); break;
      case NodeKind::Member:
        expr(n.child(0), 12);
        out_ += '.' + n.key.text();
        break;
      case NodeKind::Index:
        expr(n.child(0), 12);
        out_ += '[';
        expr(n.child(1), 0);
        out_ += ']';
        break;
      case NodeKind::Call:
        expr(n.child(0), 12);
        args(n, 1);
        break;
      case NodeKind::New:
        out_ += "new ";
        if (n.child(0).kind == NodeKind::Call) {
          out_ += '(';
          expr(n.child(0), 0);
          out_ += ')';
        } else {
          expr(n.child(0), 12);
        }
        args(n, 1);
        break;
      case NodeKind::Assign:
        expr(n.child(0), 12);
        out_ += ' ';
        if (n.op != Op::None) out_ += op_text(n.op);
        out_ += "= ";
        expr(n.child(1), 1);
        break;
      case NodeKind::Update:
        if (n.has(flag::kPrefix)) {
          out_ += op_text(n.op);
          expr(n.child(0), 12);
        } else {
          expr(n.child(0), 12);
          out_ += op_text(n.op);
        }
        break;
      case NodeKind::Unary: {
        out_ += op_text(n.op);
        const Node& arg = n.child(0);
        // Avoid "--x" or "- -x" being read as an update.
        bool sep = (n.op == Op::Neg || n.op == Op::Plus) &&
                   ((arg.kind == NodeKind::Unary && (arg.op == Op::Neg || arg.op == Op::Plus)) ||
                    (arg.kind == NodeKind::Update && arg.has(flag::kPrefix)) ||
                    (arg.kind == NodeKind::Literal && arg.literal == LiteralKind::Number && arg.number < 0));
        if (sep) out_ += ' ';
        expr(arg, 9);
        break;
      }
      case NodeKind::Binary:
        expr(n.child(0), p);
        out_ += ' ';
        out_ += op_text(n.op);
        out_ += ' ';
        expr(n.child(1), p + 1);
        break;
      case NodeKind::Conditional:
        expr(n.child(0), 3);
        out_ += " ? ";
        expr(n.child(1), 1);
        out_ += " : ";
        expr(n.child(2), 1);
        break;
      case NodeKind::FunctionLit: function(n, depth_hint_); break;
      case NodeKind::ArrayLit:
        out_ += '[';
        for (std::size_t i = 0; i < n.size(); ++i) {
          if (i) out_ += ", ";
          expr(n.child(i), 2);
        }
        out_ += ']';
        break;
      case NodeKind::ObjectLit:
        if (n.size() == 0) {
          out_ += "{}";
          break;
        }
        out_ += "{ ";
        for (std::size_t i = 0; i < n.size(); ++i) {
          if (i) out_ += ", ";
          const Node& prop = n.child(i);
          const Node& v = prop.child(0);
          if (v.kind == NodeKind::FunctionLit && v.has(flag::kMethod)) {
            method(v, depth_hint_);
          } else {
            out_ += quote_key(symbol_text(prop.symbol));
            out_ += ": ";
            expr(v, 2);
          }
        }
        out_ += " }";
        break;
      default:
        out_ += "/*";
        out_ += node_kind_name(n.kind);
        out_ += "*/";
        break;
    }
    if (paren) out_ += ')';
  }

  static std::string quote_key(const std::string& k) {
    bool ident = !k.empty() && !(k[0] >= '0' && k[0] <= '9');
    for (char c : k) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) ident = false;
    }
    return ident ? k : quote_string(k);
  }

  std::string out_;
  int depth_hint_ = 0;
};

}  // namespace

std::size_t count_ast_nodes(const Node& root) { return count_rec(root); }

std::string dump_ast(const Node& root) {
  std::string out;
  dump_rec(root, 0, out);
  out += '\n';
  return out;
}

std::string to_source(const Node& root) { return Printer().run(root); }

NodePtr clone(const Node& n) {
  auto c = std::make_unique<Node>();
  c->kind = n.kind;
  c->op = n.op;
  c->literal = n.literal;
  c->flags = n.flags;
  c->id = n.id;
  c->span = n.span;
  c->symbol = n.symbol;
  c->number = n.number;
  c->key = n.key;
  c->text = n.text;
  c->locals = n.locals;
  c->children.reserve(n.children.size());
  for (auto& ch : n.children) c->children.push_back(clone(*ch));
  return c;
}

}  // namespace rxl
