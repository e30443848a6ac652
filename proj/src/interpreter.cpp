#include "rxl/interpreter.hpp"

#include <cmath>

#include "rxl/constraints.hpp"
#include "rxl/engine.hpp"
#include "rxl/layers.hpp"
#include "rxl/queries.hpp"
#include "rxl/signals.hpp"

namespace rxl {

namespace {

struct DepthGuard {
  DepthGuard(std::size_t& d, const Node* at) : d_(d) {
    if (++d_ > Interpreter::kMaxDepth) {
      --d_;
      throw RuntimeError(RuntimeErrorKind::StackOverflow, "maximum call depth exceeded",
                         at ? at->span.pos() : SourcePos{});
    }
  }
  ~DepthGuard() { --d_; }
  std::size_t& d_;
};

template <class T>
struct Restore {
  Restore(T& slot, T value) : slot_(slot), saved_(std::move(slot)) { slot_ = std::move(value); }
  ~Restore() { slot_ = std::move(saved_); }
  T& slot_;
  T saved_;
};

[[noreturn]] void type_error(Engine& e, Op op, Value a, Value b, SourcePos pos) {
  std::string msg = std::string("cannot apply '") + op_text(op) + "' to " + kind_name(a.kind());
  if (op != Op::Neg && op != Op::Plus && op != Op::Inc && op != Op::Dec) msg += std::string(" and ") + kind_name(b.kind());
  (void)e;
  throw RuntimeError(RuntimeErrorKind::DivisionTypes, msg, pos);
}

}  // namespace

Value binary_op(Engine& engine, Op op, Value a, Value b, SourcePos pos) {
  switch (op) {
    case Op::Add:
      if (a.is_number() && b.is_number()) return Value::number(a.as_number() + b.as_number());
      if (a.is_string() || b.is_string()) return Value::string(engine.display(a) + engine.display(b));
      type_error(engine, op, a, b, pos);
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Mod: {
      if (!a.is_number() || !b.is_number()) type_error(engine, op, a, b, pos);
      double x = a.as_number(), y = b.as_number();
      switch (op) {
        case Op::Sub: return Value::number(x - y);
        case Op::Mul: return Value::number(x * y);
        case Op::Div: return Value::number(x / y);
        default: return Value::number(std::fmod(x, y));
      }
    }
    case Op::Lt:
    case Op::Le:
    case Op::Gt:
    case Op::Ge: {
      int c;
      if (a.is_number() && b.is_number()) {
        double x = a.as_number(), y = b.as_number();
        if (std::isnan(x) || std::isnan(y)) return Value::boolean(false);
        c = x < y ? -1 : (x > y ? 1 : 0);
      } else if (a.is_string() && b.is_string()) {
        c = symbol_text(a.as_symbol()).compare(symbol_text(b.as_symbol()));
      } else {
        type_error(engine, op, a, b, pos);
      }
      switch (op) {
        case Op::Lt: return Value::boolean(c < 0);
        case Op::Le: return Value::boolean(c <= 0);
        case Op::Gt: return Value::boolean(c > 0);
        default: return Value::boolean(c >= 0);
      }
    }
    case Op::Eq:
    case Op::StrictEq: return Value::boolean(strict_equals(a, b));
    case Op::Ne:
    case Op::StrictNe: return Value::boolean(!strict_equals(a, b));
    default: type_error(engine, op, a, b, pos);
  }
}

Value Interpreter::run_program(const ProgramPtr& program, const ScopePtr& scope) {
  Restore<ProgramPtr> p(program_, program);
  Restore<const Node*> t(top_block_, program->root.get());
  last_ = Value();
  exec_list(*program->root, scope, true, program->hooked ? 1 : 0);
  Value result = last_;
  last_ = Value();
  return result;
}

void Interpreter::hoist(const Node& block, const ScopePtr& env) {
  for (auto& s : block.children) {
    if (s->kind == NodeKind::FunctionLit && s->has(flag::kDeclaration)) {
      env->declare(s->symbol, engine_.new_closure(*s, program_, env), engine_.next_decl_seq());
    }
  }
}

Interpreter::Flow Interpreter::exec_list(const Node& block, const ScopePtr& env, bool top, std::size_t skip) {
  hoist(block, env);
  for (std::size_t i = skip; i < block.size(); ++i) {
    const NodePtr& s = block.children[i];
    if (top && s->kind == NodeKind::VarDecl && s->has(flag::kVar)) {
      for (auto& id : s->children) {
        Value v = id->size() ? eval(id->child(0), env) : Value();
        engine_.globals()->declare(id->symbol, v, engine_.next_decl_seq());
      }
      continue;
    }
    if (exec(*s, env) == Flow::Return) return Flow::Return;
  }
  return Flow::Normal;
}

Interpreter::Flow Interpreter::exec(const Node& n, const ScopePtr& env) {
  switch (n.kind) {
    case NodeKind::ExprStmt: {
      Value v = eval(n.child(0), env);
      if (depth_ == 0) last_ = v;
      return Flow::Normal;
    }
    case NodeKind::VarDecl:
      for (auto& id : n.children) {
        Value v = id->size() ? eval(id->child(0), env) : Value();
        env->declare(id->symbol, v, engine_.next_decl_seq());
      }
      return Flow::Normal;
    case NodeKind::FunctionLit:
      if (!n.has(flag::kDeclaration)) eval(n, env);
      return Flow::Normal;
    case NodeKind::ClassDecl:
      eval_class(n, env);
      return Flow::Normal;
    case NodeKind::If: {
      if (eval(n.child(0), env).truthy()) return exec(n.child(1), env);
      if (n.size() > 2) return exec(n.child(2), env);
      return Flow::Normal;
    }
    case NodeKind::While:
      while (eval(n.child(0), env).truthy()) {
        if (exec(n.child(1), env) == Flow::Return) return Flow::Return;
      }
      return Flow::Normal;
    case NodeKind::ForOf: {
      Value arr = eval(n.child(0), env);
      if (!arr.is_array()) {
        throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                           std::string("cannot iterate over ") + kind_name(arr.kind()), n.span.pos());
      }
      const Node& body = n.child(1);
      for (std::uint32_t i = 0;; ++i) {
        Value len = member_get(arr, PropKey::name(sym::length()), n);
        if (!(len.is_number() && i < len.as_number())) break;
        Value item = member_get(arr, PropKey::index(i), n);
        ScopePtr scope = engine_.new_scope(env);
        scope->declare(n.symbol, item, engine_.next_decl_seq());
        if (exec_list(body, scope) == Flow::Return) return Flow::Return;
      }
      return Flow::Normal;
    }
    case NodeKind::Return:
      ret_ = n.size() ? eval(n.child(0), env) : Value();
      return Flow::Return;
    case NodeKind::Block:
      if (n.has(flag::kScoped)) return exec_list(n, engine_.new_scope(env));
      return exec_list(n, env);
    case NodeKind::Label: return exec(n.child(0), env);
    case NodeKind::SignalDecl:
      engine_.signals().define(n, program_, env);
      return Flow::Normal;
    case NodeKind::AlwaysStmt:
      engine_.constraints().declare(n, program_, env);
      return Flow::Normal;
    case NodeKind::Comment: return Flow::Normal;
    default: {
      Value v = eval(n, env);
      if (depth_ == 0) last_ = v;
      return Flow::Normal;
    }
  }
}

Scope::Binding& Interpreter::resolve(const ScopePtr& env, Symbol name, const Node& at, Scope** owner) {
  Scope::Binding* b = env->lookup(name, owner);
  if (!b) {
    throw RuntimeError(RuntimeErrorKind::UndefinedVariable, "'" + symbol_text(name) + "' is not defined",
                       at.span.pos());
  }
  return *b;
}

Value Interpreter::member_get(Value obj, PropKey key, const Node& at) {
  if (!obj.has_properties() && !(obj.is_string() && key == PropKey::name(sym::length()))) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                       "cannot read '" + key.text() + "' of " + kind_name(obj.kind()), at.span.pos());
  }
  return engine_.load_member_interp(obj, key);
}

void Interpreter::args_into(const Node& n, std::size_t from, const ScopePtr& env, std::vector<Value>& out) {
  out.reserve(n.size() - from);
  for (std::size_t i = from; i < n.size(); ++i) out.push_back(eval(n.child(i), env));
}

Value Interpreter::eval(const Node& n, const ScopePtr& env) {
  switch (n.kind) {
    case NodeKind::Literal:
      switch (n.literal) {
        case LiteralKind::Nil: return Value();
        case LiteralKind::True: return Value::boolean(true);
        case LiteralKind::False: return Value::boolean(false);
        case LiteralKind::Number: return Value::number(n.number);
        case LiteralKind::String: return Value::string(n.symbol);
      }
      return Value();
    case NodeKind::Ident: {
      if (n.symbol == sym::this_()) {
        Scope::Binding* b = env->lookup(n.symbol);
        return b ? b->value : Value();
      }
      return resolve(env, n.symbol, n, nullptr).value;
    }
    case NodeKind::Member: return member_get(eval(n.child(0), env), n.key, n);
    case NodeKind::Index: {
      Value obj = eval(n.child(0), env);
      Value idx = eval(n.child(1), env);
      return member_get(obj, PropKey::from_value(idx), n);
    }
    case NodeKind::Call: return eval_call(n, env);
    case NodeKind::New: return eval_new(n, env);
    case NodeKind::FunctionLit: {
      Value fn = engine_.new_closure(n, program_, env);
      if (n.has(flag::kDeclaration)) env->declare(n.symbol, fn, engine_.next_decl_seq());
      return fn;
    }
    case NodeKind::ObjectLit: {
      Value obj = engine_.new_object();
      for (auto& prop : n.children) {
        Value v = eval(prop->child(0), env);
        ObjectCell& cell = engine_.heap().object(obj.heap_id());
        PropKey key = PropKey::name(prop->symbol);
        if (Value* slot = cell.find_own(key)) {
          *slot = v;
        } else {
          cell.props.emplace_back(key, v);
        }
      }
      return obj;
    }
    case NodeKind::ArrayLit: {
      std::vector<Value> items;
      args_into(n, 0, env, items);
      return engine_.new_array(std::move(items));
    }
    case NodeKind::Assign: return eval_assign(n, env);
    case NodeKind::Update: return eval_update(n, env);
    case NodeKind::Binary: {
      if (n.op == Op::And) {
        Value a = eval(n.child(0), env);
        return a.truthy() ? eval(n.child(1), env) : a;
      }
      if (n.op == Op::Or) {
        Value a = eval(n.child(0), env);
        return a.truthy() ? a : eval(n.child(1), env);
      }
      Value a = eval(n.child(0), env);
      Value b = eval(n.child(1), env);
      if (a.is_number() && b.is_number()) {
        double x = a.as_number(), y = b.as_number();
        switch (n.op) {
          case Op::Add: return Value::number(x + y);
          case Op::Sub: return Value::number(x - y);
          case Op::Mul: return Value::number(x * y);
          case Op::Lt: return Value::boolean(x < y);
          case Op::Le: return Value::boolean(x <= y);
          case Op::Gt: return Value::boolean(x > y);
          case Op::Ge: return Value::boolean(x >= y);
          default: break;
        }
      }
      return binary_op(engine_, n.op, a, b, n.span.pos());
    }
    case NodeKind::Unary: {
      Value a = eval(n.child(0), env);
      if (n.op == Op::Not) return Value::boolean(!a.truthy());
      if (!a.is_number()) type_error(engine_, n.op, a, a, n.span.pos());
      return Value::number(n.op == Op::Neg ? -a.as_number() : a.as_number());
    }
    case NodeKind::Conditional:
      return eval(n.child(0), env).truthy() ? eval(n.child(1), env) : eval(n.child(2), env);
    case NodeKind::ClassDecl: return eval_class(n, env);
    default:
      throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                         std::string("unexpected ") + node_kind_name(n.kind) + " in expression", n.span.pos());
  }
}

Value Interpreter::eval_assign(const Node& n, const ScopePtr& env) {
  const Node& target = n.child(0);
  switch (target.kind) {
    case NodeKind::Ident: {
      Value v = eval(n.child(1), env);
      Scope* owner = nullptr;
      Scope::Binding& b = resolve(env, target.symbol, target, &owner);
      if (n.op != Op::None) v = binary_op(engine_, n.op, b.value, v, n.span.pos());
      engine_.store_binding(*owner, b, v);
      return v;
    }
    case NodeKind::Member:
    case NodeKind::Index: {
      Value obj = eval(target.child(0), env);
      PropKey key = target.kind == NodeKind::Member ? target.key : PropKey::from_value(eval(target.child(1), env));
      if (!obj.has_properties()) {
        throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                           "cannot set '" + key.text() + "' on " + kind_name(obj.kind()), target.span.pos());
      }
      Value v;
      if (n.op != Op::None) {
        Value old = member_get(obj, key, target);
        v = binary_op(engine_, n.op, old, eval(n.child(1), env), n.span.pos());
      } else {
        v = eval(n.child(1), env);
      }
      engine_.store_member(obj, key, v);
      return v;
    }
    default: throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "invalid assignment target", n.span.pos());
  }
}

Value Interpreter::eval_update(const Node& n, const ScopePtr& env) {
  const Node& target = n.child(0);
  double delta = n.op == Op::Inc ? 1 : -1;
  auto bump = [&](Value old) {
    if (!old.is_number()) type_error(engine_, n.op, old, old, n.span.pos());
    return Value::number(old.as_number() + delta);
  };
  if (target.kind == NodeKind::Ident) {
    Scope* owner = nullptr;
    Scope::Binding& b = resolve(env, target.symbol, target, &owner);
    Value old = b.value;
    Value v = bump(old);
    engine_.store_binding(*owner, b, v);
    return n.has(flag::kPrefix) ? v : old;
  }
  Value obj = eval(target.child(0), env);
  PropKey key = target.kind == NodeKind::Member ? target.key : PropKey::from_value(eval(target.child(1), env));
  Value old = member_get(obj, key, target);
  Value v = bump(old);
  engine_.store_member(obj, key, v);
  return n.has(flag::kPrefix) ? v : old;
}

Value Interpreter::eval_call(const Node& n, const ScopePtr& env) {
  const Node& callee = n.child(0);
  std::vector<Value> args;
  if (callee.kind == NodeKind::Member || callee.kind == NodeKind::Index) {
    Value obj = eval(callee.child(0), env);
    PropKey key =
        callee.kind == NodeKind::Member ? callee.key : PropKey::from_value(eval(callee.child(1), env));
    Value fn = member_get(obj, key, callee);
    args_into(n, 1, env, args);
    if (!fn.is_function()) {
      throw RuntimeError(RuntimeErrorKind::NotCallable, "'" + key.text() + "' is not a function", n.span.pos());
    }
    engine_.set_caller_scope(env);
    return invoke_method(obj, key, fn, args);
  }
  Value fn = eval(callee, env);
  args_into(n, 1, env, args);
  if (!fn.is_function()) {
    std::string what = callee.kind == NodeKind::Ident ? "'" + symbol_text(callee.symbol) + "'" : "value";
    throw RuntimeError(RuntimeErrorKind::NotCallable, what + " is not a function", n.span.pos());
  }
  Restore<const Node*> site(call_site_, n.has(flag::kAexprSite) ? &n : nullptr);
  engine_.set_caller_scope(env);
  return call(fn, Value(), args);
}

Value Interpreter::invoke_method(Value obj, PropKey key, Value fn, std::span<const Value> args) {
  if (obj.is_object() && engine_.layers().active()) {
    if (auto r = engine_.layers().dispatch(obj, key, fn, args)) return *r;
  }
  return call(fn, obj, args);
}

Value Interpreter::eval_new(const Node& n, const ScopePtr& env) {
  Value cls = eval(n.child(0), env);
  std::vector<Value> args;
  args_into(n, 1, env, args);
  if (cls.is_function() && engine_.heap().function(cls.heap_id()).fkind == FunctionKind::Native) {
    return call(cls, Value(), args);
  }
  if (!cls.is_class()) {
    throw RuntimeError(RuntimeErrorKind::NotCallable, std::string("cannot instantiate ") + kind_name(cls.kind()),
                       n.span.pos());
  }
  ClassCell& c = engine_.heap().klass(cls.heap_id());
  Value obj = engine_.new_object(c.prototype);
  engine_.heap().object(obj.heap_id()).klass = cls.heap_id();
  if (c.constructor.is_function()) call(c.constructor, obj, args);
  engine_.queries().on_new_instance(cls, obj);
  return obj;
}

Value Interpreter::eval_class(const Node& n, const ScopePtr& env) {
  auto [cid, cell] = engine_.heap().alloc<ClassCell>();
  cell->name = n.symbol;
  Value proto = engine_.new_object();
  engine_.heap().klass(cid).prototype = proto.heap_id();
  for (auto& m : n.children) {
    Value fn = engine_.new_closure(*m, program_, env);
    if (m->symbol == sym::constructor()) {
      engine_.heap().klass(cid).constructor = fn;
    } else {
      engine_.heap().object(proto.heap_id()).props.emplace_back(PropKey::name(m->symbol), fn);
    }
  }
  Value cls = Value::ref(ValueKind::Class, cid);
  env->declare(n.symbol, cls, engine_.next_decl_seq());
  engine_.queries().register_class(cls);
  return cls;
}

Value Interpreter::call(Value fn, Value self, std::span<const Value> args) {
  if (!fn.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "value is not a function");
  FunctionCell& f = engine_.heap().function(fn.heap_id());
  switch (f.fkind) {
    case FunctionKind::Closure: return call_node(*f.node, f.program, f.closure, self, args);
    case FunctionKind::Expression: return eval_expression(*f.node, f.program, f.closure);
    case FunctionKind::Bound: {
      std::vector<Value> all = f.bound_args;
      all.insert(all.end(), args.begin(), args.end());
      return call(f.target, self, all);
    }
    case FunctionKind::Native: {
      DepthGuard guard(depth_, nullptr);
      AnalysisFrame* top = engine_.top_frame();
      if (top && top->kind == FrameKind::Interpretation && !top->suspended) {
        top->suspended = true;
        struct Resume {
          Engine& e;
          ~Resume() {
            if (auto* t = e.top_frame()) t->suspended = false;
          }
        } resume{engine_};
        return f.native(engine_, self, args);
      }
      return f.native(engine_, self, args);
    }
  }
  return Value();
}

Value Interpreter::call_node(const Node& fn, const ProgramPtr& program, const ScopePtr& closure, Value self,
                             std::span<const Value> args) {
  DepthGuard guard(depth_, &fn);
  Restore<ProgramPtr> p(program_, program);
  ScopePtr scope = engine_.new_scope(closure);
  if (!fn.has(flag::kArrow)) scope->declare(sym::this_(), self, 0);
  std::size_t nparams = fn.size() - 1;
  for (std::size_t i = 0; i < nparams; ++i) {
    scope->declare(fn.child(i).symbol, i < args.size() ? args[i] : Value(), engine_.next_decl_seq());
  }
  const Node& body = *fn.children.back();
  if (fn.has(flag::kExprBody)) return eval(body, scope);
  if (exec_list(body, scope) == Flow::Return) {
    Value r = ret_;
    ret_ = Value();
    return r;
  }
  return Value();
}

Value Interpreter::eval_expression(const Node& expr, const ProgramPtr& program, const ScopePtr& env) {
  DepthGuard guard(depth_, &expr);
  Restore<ProgramPtr> p(program_, program);
  return eval(expr, env);
}

}  // namespace rxl
