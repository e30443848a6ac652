#include "rxl/rewriter.hpp"

#include <unordered_set>

#include "rxl/parser.hpp"

namespace rxl {

namespace {

NodePtr node(NodeKind kind) {
  auto n = std::make_unique<Node>();
  n->kind = kind;
  return n;
}

NodePtr ident(std::string_view name) {
  NodePtr n = node(NodeKind::Ident);
  n->symbol = intern(name);
  return n;
}

NodePtr str(const std::string& text) {
  NodePtr n = node(NodeKind::Literal);
  n->literal = LiteralKind::String;
  n->text = text;
  n->symbol = intern(text);
  return n;
}

NodePtr num(double v) {
  NodePtr n = node(NodeKind::Literal);
  n->literal = LiteralKind::Number;
  n->number = v;
  return n;
}

template <class... Args>
NodePtr call(NodePtr callee, Args... args) {
  NodePtr n = node(NodeKind::Call);
  n->children.push_back(std::move(callee));
  (n->children.push_back(std::move(args)), ...);
  return n;
}

template <class... Args>
NodePtr hook(std::string_view name, Args... args) {
  return call(ident(name), std::move(args)...);
}

NodePtr binary(Op op, NodePtr a, NodePtr b) {
  NodePtr n = node(NodeKind::Binary);
  n->op = op;
  n->children.push_back(std::move(a));
  n->children.push_back(std::move(b));
  return n;
}

NodePtr unary(Op op, NodePtr a) {
  NodePtr n = node(NodeKind::Unary);
  n->op = op;
  n->children.push_back(std::move(a));
  return n;
}

NodePtr let(std::string_view name, NodePtr init) {
  NodePtr d = node(NodeKind::VarDecl);
  NodePtr id = ident(name);
  id->children.push_back(std::move(init));
  d->children.push_back(std::move(id));
  return d;
}

NodePtr expr_stmt(NodePtr e) {
  NodePtr s = node(NodeKind::ExprStmt);
  s->children.push_back(std::move(e));
  return s;
}

NodePtr ret(NodePtr e) {
  NodePtr s = node(NodeKind::Return);
  s->children.push_back(std::move(e));
  return s;
}

// Arrow function over `params`, called immediately with `args`.
NodePtr iife(const std::vector<std::string>& params, NodePtr body, std::vector<NodePtr> args) {
  NodePtr fn = node(NodeKind::FunctionLit);
  fn->flags = flag::kArrow;
  if (body->kind != NodeKind::Block) fn->flags |= flag::kExprBody;
  for (auto& p : params) fn->children.push_back(ident(p));
  fn->children.push_back(std::move(body));
  NodePtr c = node(NodeKind::Call);
  c->children.push_back(std::move(fn));
  for (auto& a : args) c->children.push_back(std::move(a));
  return c;
}

bool is_this(const Node& n) { return n.kind == NodeKind::Ident && n.symbol == sym::this_(); }

class Rewriter {
 public:
  NodePtr run(const Node& root) {
    NodePtr out = node(NodeKind::Program);
    out->children.push_back(expr_stmt(str(std::string(kHooksMarker))));
    scopes_.push_back(Lex{{}, true, -1});
    collect(root.children, scopes_.back().names);
    for (auto& s : root.children) out->children.push_back(stmt(*s));
    scopes_.pop_back();
    return out;
  }

 private:
  struct Lex {
    std::unordered_set<Symbol> names;
    bool top = false;
    int id = -1;
  };
  enum class RefKind { Local, Global, Undeclared };
  struct Ref {
    RefKind kind;
    std::size_t scope = 0;
  };

  static void collect(const std::vector<NodePtr>& stmts, std::unordered_set<Symbol>& names) {
    for (auto& s : stmts) {
      const Node* n = s.get();
      while (n->kind == NodeKind::Label) n = &n->child(0);
      switch (n->kind) {
        case NodeKind::VarDecl:
          for (auto& d : n->children) names.insert(d->symbol);
          break;
        case NodeKind::FunctionLit:
          if (n->has(flag::kDeclaration)) names.insert(n->symbol);
          break;
        case NodeKind::ClassDecl:
        case NodeKind::SignalDecl: names.insert(n->symbol); break;
        default: break;
      }
    }
  }

  std::string tmp() { return "_tmp_" + std::to_string(++next_tmp_); }

  Ref resolve(Symbol s) {
    for (std::size_t i = scopes_.size(); i-- > 0;) {
      if (!scopes_[i].names.count(s)) continue;
      if (scopes_[i].top) return {RefKind::Global};
      if (scopes_[i].id < 0) scopes_[i].id = next_scope_++;
      return {RefKind::Local, i};
    }
    return {RefKind::Undeclared};
  }

  NodePtr scope_ref(const Ref& r) { return ident("_scope_" + std::to_string(scopes_[r.scope].id)); }

  NodePtr read(Symbol s) {
    Ref r = resolve(s);
    if (r.kind == RefKind::Local) return hook("get_local", scope_ref(r), str(symbol_text(s)));
    return hook("get_global", str(symbol_text(s)));
  }

  NodePtr write(Symbol s, NodePtr v) {
    Ref r = resolve(s);
    if (r.kind == RefKind::Local) return hook("set_local", scope_ref(r), str(symbol_text(s)), std::move(v));
    return hook("set_global", str(symbol_text(s)), std::move(v));
  }

  // Wraps a freshly rewritten body with the scope reification if any access needs it.
  void inject(Node& block, const Lex& lex) {
    if (lex.id < 0) return;
    block.children.insert(block.children.begin(),
                          let("_scope_" + std::to_string(lex.id), hook("reify_scope")));
  }

  NodePtr stmt(const Node& n) {
    switch (n.kind) {
      case NodeKind::VarDecl: {
        NodePtr d = node(NodeKind::VarDecl);
        d->flags = n.flags;
        for (auto& id : n.children) {
          NodePtr i = ident(symbol_text(id->symbol));
          if (id->size()) i->children.push_back(expr(id->child(0)));
          d->children.push_back(std::move(i));
        }
        return d;
      }
      case NodeKind::SignalDecl: {
        NodePtr d = node(NodeKind::SignalDecl);
        d->symbol = n.symbol;
        d->children.push_back(expr(n.child(0)));
        return d;
      }
      case NodeKind::AlwaysStmt:
      case NodeKind::Comment: return clone(n);
      case NodeKind::ClassDecl: {
        NodePtr c = node(NodeKind::ClassDecl);
        c->symbol = n.symbol;
        for (auto& m : n.children) c->children.push_back(function(*m));
        return c;
      }
      case NodeKind::FunctionLit: return function(n);
      case NodeKind::If: {
        NodePtr s = node(NodeKind::If);
        s->children.push_back(expr(n.child(0)));
        for (std::size_t i = 1; i < n.size(); ++i) s->children.push_back(stmt(n.child(i)));
        return s;
      }
      case NodeKind::While: {
        NodePtr s = node(NodeKind::While);
        s->children.push_back(expr(n.child(0)));
        s->children.push_back(stmt(n.child(1)));
        return s;
      }
      case NodeKind::ForOf: return for_of(n);
      case NodeKind::Return: {
        NodePtr s = node(NodeKind::Return);
        if (n.size()) s->children.push_back(expr(n.child(0)));
        return s;
      }
      case NodeKind::Block: {
        NodePtr b = node(NodeKind::Block);
        if (!n.has(flag::kScoped)) {
          for (auto& s : n.children) b->children.push_back(stmt(*s));
          return b;
        }
        scopes_.push_back(Lex{});
        collect(n.children, scopes_.back().names);
        for (auto& s : n.children) b->children.push_back(stmt(*s));
        inject(*b, scopes_.back());
        scopes_.pop_back();
        return b;
      }
      case NodeKind::Label: {
        NodePtr l = node(NodeKind::Label);
        l->symbol = n.symbol;
        l->children.push_back(stmt(n.child(0)));
        return l;
      }
      case NodeKind::ExprStmt: {
        const Node& e = n.child(0);
        if (e.kind == NodeKind::Update) return expr_stmt(update(e, false));
        return expr_stmt(expr(e));
      }
      default: return expr_stmt(expr(n));
    }
  }

  NodePtr for_of(const Node& n) {
    std::string items = tmp();
    std::string index = tmp();
    NodePtr outer = node(NodeKind::Block);
    outer->children.push_back(let(items, expr(n.child(0))));
    outer->children.push_back(let(index, num(0)));

    NodePtr body = node(NodeKind::Block);
    scopes_.push_back(Lex{});
    scopes_.back().names.insert(n.symbol);
    const Node& src = n.child(1);
    body->children.push_back(let(symbol_text(n.symbol), hook("get_member", ident(items), ident(index))));
    if (src.kind == NodeKind::Block) {
      collect(src.children, scopes_.back().names);
      for (auto& s : src.children) body->children.push_back(stmt(*s));
    } else {
      body->children.push_back(stmt(src));
    }
    NodePtr step = node(NodeKind::Assign);
    step->children.push_back(ident(index));
    step->children.push_back(binary(Op::Add, ident(index), num(1)));
    body->children.push_back(expr_stmt(std::move(step)));
    inject(*body, scopes_.back());
    scopes_.pop_back();

    NodePtr loop = node(NodeKind::While);
    loop->children.push_back(binary(Op::Lt, ident(index), hook("get_member", ident(items), str("length"))));
    loop->children.push_back(std::move(body));
    outer->children.push_back(std::move(loop));
    return outer;
  }

  NodePtr function(const Node& fn) {
    NodePtr out = node(NodeKind::FunctionLit);
    out->flags = fn.flags;
    out->symbol = fn.symbol;
    scopes_.push_back(Lex{});
    for (std::size_t i = 0; i + 1 < fn.size(); ++i) {
      scopes_.back().names.insert(fn.child(i).symbol);
      out->children.push_back(ident(symbol_text(fn.child(i).symbol)));
    }
    const Node& body = *fn.children.back();
    if (fn.has(flag::kExprBody)) {
      NodePtr e = expr(body);
      if (scopes_.back().id >= 0) {
        NodePtr b = node(NodeKind::Block);
        b->children.push_back(ret(std::move(e)));
        inject(*b, scopes_.back());
        out->flags &= static_cast<std::uint16_t>(~flag::kExprBody);
        e = std::move(b);
      }
      out->children.push_back(std::move(e));
    } else {
      collect(body.children, scopes_.back().names);
      NodePtr b = node(NodeKind::Block);
      for (auto& s : body.children) b->children.push_back(stmt(*s));
      inject(*b, scopes_.back());
      out->children.push_back(std::move(b));
    }
    scopes_.pop_back();
    return out;
  }

  static bool pure(const Node& n) {
    return n.kind == NodeKind::Ident || n.kind == NodeKind::Literal;
  }

  NodePtr key_of(const Node& target) {
    return target.kind == NodeKind::Member ? str(target.key.text()) : expr(target.child(1));
  }

  // Evaluates the object (and key) of a member target once, then builds the access with `make`.
  template <class F>
  NodePtr with_target(const Node& target, F make) {
    const Node& obj = target.child(0);
    bool key_pure = target.kind == NodeKind::Member || pure(target.child(1));
    if (pure(obj) && key_pure) {
      return make([&] { return expr(obj); }, [&] { return key_of(target); });
    }
    std::string o = tmp();
    std::string k = tmp();
    std::vector<NodePtr> args;
    args.push_back(expr(obj));
    args.push_back(key_of(target));
    NodePtr body = make([&] { return ident(o); }, [&] { return ident(k); });
    return iife({o, k}, std::move(body), std::move(args));
  }

  NodePtr assign(const Node& n) {
    const Node& target = n.child(0);
    const Node& rhs = n.child(1);
    if (target.kind == NodeKind::Ident) {
      NodePtr v = n.op == Op::None ? expr(rhs) : binary(n.op, read(target.symbol), expr(rhs));
      return write(target.symbol, std::move(v));
    }
    if (n.op == Op::None) return hook("set_member", expr(target.child(0)), key_of(target), expr(rhs));
    return with_target(target, [&](auto obj, auto key) {
      NodePtr v = binary(n.op, hook("get_member", obj(), key()), expr(rhs));
      return hook("set_member", obj(), key(), std::move(v));
    });
  }

  NodePtr update(const Node& n, bool used) {
    const Node& target = n.child(0);
    Op op = n.op == Op::Inc ? Op::Add : Op::Sub;
    bool value_needed = used && !n.has(flag::kPrefix);
    if (target.kind == NodeKind::Ident) {
      if (!value_needed) return write(target.symbol, binary(op, unary(Op::Plus, read(target.symbol)), num(1)));
      std::string old = tmp();
      NodePtr b = node(NodeKind::Block);
      b->children.push_back(expr_stmt(write(target.symbol, binary(op, ident(old), num(1)))));
      b->children.push_back(ret(ident(old)));
      std::vector<NodePtr> args;
      args.push_back(unary(Op::Plus, read(target.symbol)));
      return iife({old}, std::move(b), std::move(args));
    }
    if (!value_needed) {
      return with_target(target, [&](auto obj, auto key) {
        NodePtr v = binary(op, unary(Op::Plus, hook("get_member", obj(), key())), num(1));
        return hook("set_member", obj(), key(), std::move(v));
      });
    }
    std::string o = tmp();
    std::string k = tmp();
    std::string old = tmp();
    NodePtr b = node(NodeKind::Block);
    b->children.push_back(let(old, unary(Op::Plus, hook("get_member", ident(o), ident(k)))));
    b->children.push_back(expr_stmt(hook("set_member", ident(o), ident(k), binary(op, ident(old), num(1)))));
    b->children.push_back(ret(ident(old)));
    std::vector<NodePtr> args;
    args.push_back(expr(target.child(0)));
    args.push_back(key_of(target));
    return iife({o, k}, std::move(b), std::move(args));
  }

  NodePtr expr(const Node& n) {
    switch (n.kind) {
      case NodeKind::Literal: return clone(n);
      case NodeKind::Ident: return is_this(n) ? clone(n) : read(n.symbol);
      case NodeKind::Member: return hook("get_member", expr(n.child(0)), str(n.key.text()));
      case NodeKind::Index: return hook("get_member", expr(n.child(0)), expr(n.child(1)));
      case NodeKind::Assign: return assign(n);
      case NodeKind::Update: return update(n, true);
      case NodeKind::Call: {
        const Node& callee = n.child(0);
        NodePtr c = node(NodeKind::Call);
        c->flags = n.flags;
        if (callee.kind == NodeKind::Member || callee.kind == NodeKind::Index) {
          c->children.push_back(ident("call_member"));
          c->children.push_back(expr(callee.child(0)));
          c->children.push_back(key_of(callee));
        } else if (callee.kind == NodeKind::Ident && !is_this(callee) &&
                   resolve(callee.symbol).kind == RefKind::Undeclared) {
          c->children.push_back(clone(callee));
        } else {
          c->children.push_back(expr(callee));
        }
        for (std::size_t i = 1; i < n.size(); ++i) c->children.push_back(expr(n.child(i)));
        return c;
      }
      case NodeKind::New: {
        NodePtr c = node(NodeKind::New);
        const Node& callee = n.child(0);
        c->children.push_back(callee.kind == NodeKind::Ident ? clone(callee) : expr(callee));
        for (std::size_t i = 1; i < n.size(); ++i) c->children.push_back(expr(n.child(i)));
        return c;
      }
      case NodeKind::FunctionLit: return function(n);
      case NodeKind::ObjectLit: {
        NodePtr o = node(NodeKind::ObjectLit);
        for (auto& p : n.children) {
          NodePtr prop = node(NodeKind::Property);
          prop->symbol = p->symbol;
          prop->children.push_back(expr(p->child(0)));
          o->children.push_back(std::move(prop));
        }
        return o;
      }
      case NodeKind::ArrayLit:
      case NodeKind::Binary:
      case NodeKind::Unary:
      case NodeKind::Conditional: {
        NodePtr o = node(n.kind);
        o->op = n.op;
        for (auto& c : n.children) o->children.push_back(expr(*c));
        return o;
      }
      default: return clone(n);
    }
  }

  std::vector<Lex> scopes_;
  int next_scope_ = 0;
  int next_tmp_ = 0;
};

}  // namespace

std::string rewrite_source(const Program& program) {
  if (program.hooked) throw ReactiveError(ReactiveErrorKind::RewriteError, "program is already instrumented");
  NodePtr out = Rewriter().run(*program.root);
  return to_source(*out);
}

ProgramPtr rewrite(const Program& program) { return parse(rewrite_source(program)); }

}  // namespace rxl
