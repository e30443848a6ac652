#include <algorithm>
#include <cmath>

#include "rxl/engine.hpp"
#include "rxl/interpreter.hpp"
#include "rxl/triggers.hpp"

namespace rxl {

namespace {

using Args = std::span<const Value>;

Value arg(Args args, std::size_t i) { return i < args.size() ? args[i] : Value(); }

double number_arg(Args args, std::size_t i, const char* fn) {
  Value v = arg(args, i);
  if (!v.is_number()) {
    throw RuntimeError(RuntimeErrorKind::DivisionTypes,
                       std::string(fn) + " expects a number, got " + kind_name(v.kind()));
  }
  return v.as_number();
}

std::string join_display(Engine& e, Args args, const std::string& sep) {
  std::string line;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) line += sep;
    line += e.display(args[i]);
  }
  return line;
}

ObjectCell& array_self(Engine& e, Value self, const char* method) {
  if (!self.is_array()) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget, std::string(method) + " called on " + kind_name(self.kind()));
  }
  return e.heap().object(self.heap_id());
}

Value callable(Value fn, const char* what) {
  if (!fn.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, std::string(what) + " is not a function");
  return fn;
}

AExprHandle handle_arg(Engine& e, Value v) {
  auto h = e.handle_from_value(v);
  if (!h) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "expected an active expression");
  return *h;
}

ScopePtr host_scope(Engine& e, Value v) {
  ObjectCell* c = e.object_cell(v);
  ScopePtr s = c && c->host == HostKind::Scope ? c->scope.lock() : nullptr;
  if (!s) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "expected a scope object");
  return s;
}

Symbol name_arg(Value v) {
  if (!v.is_string()) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "expected a variable name");
  return v.as_symbol();
}

Value member_target(Engine& e, Value obj, Value key, PropKey& out) {
  out = PropKey::from_value(key);
  if (!obj.has_properties() && !(obj.is_string() && out == PropKey::name(sym::length()))) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                       "cannot read '" + out.text() + "' of " + kind_name(obj.kind()));
  }
  (void)e;
  return obj;
}

void install_array_methods(Engine& e) {
  HeapId proto = e.array_prototype();
  e.set_method(proto, "push", [](Engine& e, Value self, Args args) {
    array_self(e, self, "push");
    for (Value v : args) {
      auto n = static_cast<std::uint32_t>(e.heap().object(self.heap_id()).elements.size());
      e.store_member(self, PropKey::index(n), v);
    }
    return Value::number(static_cast<double>(e.heap().object(self.heap_id()).elements.size()));
  });
  e.set_method(proto, "pop", [](Engine& e, Value self, Args) {
    ObjectCell& c = array_self(e, self, "pop");
    if (c.elements.empty()) return Value();
    Value last = c.elements.back();
    e.store_member(self, PropKey::name(sym::length()), Value::number(static_cast<double>(c.elements.size() - 1)));
    return last;
  });
  e.set_method(proto, "filter", [](Engine& e, Value self, Args args) {
    array_self(e, self, "filter");
    Value fn = callable(arg(args, 0), "filter callback");
    std::vector<Value> out;
    for (std::size_t i = 0; i < e.heap().object(self.heap_id()).elements.size(); ++i) {
      Value item = e.heap().object(self.heap_id()).elements[i];
      if (e.call(fn, {item, Value::number(static_cast<double>(i))}).truthy()) out.push_back(item);
    }
    return e.new_array(std::move(out));
  });
  e.set_method(proto, "map", [](Engine& e, Value self, Args args) {
    array_self(e, self, "map");
    Value fn = callable(arg(args, 0), "map callback");
    std::vector<Value> out;
    for (std::size_t i = 0; i < e.heap().object(self.heap_id()).elements.size(); ++i) {
      Value item = e.heap().object(self.heap_id()).elements[i];
      out.push_back(e.call(fn, {item, Value::number(static_cast<double>(i))}));
    }
    return e.new_array(std::move(out));
  });
  e.set_method(proto, "forEach", [](Engine& e, Value self, Args args) {
    array_self(e, self, "forEach");
    Value fn = callable(arg(args, 0), "forEach callback");
    for (std::size_t i = 0; i < e.heap().object(self.heap_id()).elements.size(); ++i) {
      Value item = e.heap().object(self.heap_id()).elements[i];
      e.call(fn, {item, Value::number(static_cast<double>(i))});
    }
    return Value();
  });
  e.set_method(proto, "reduce", [](Engine& e, Value self, Args args) {
    array_self(e, self, "reduce");
    Value fn = callable(arg(args, 0), "reduce callback");
    std::size_t i = 0;
    Value acc;
    if (args.size() > 1) {
      acc = args[1];
    } else {
      if (e.heap().object(self.heap_id()).elements.empty()) {
        throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "reduce of empty array with no initial value");
      }
      acc = e.heap().object(self.heap_id()).elements[0];
      i = 1;
    }
    for (; i < e.heap().object(self.heap_id()).elements.size(); ++i) {
      acc = e.call(fn, {acc, e.heap().object(self.heap_id()).elements[i]});
    }
    return acc;
  });
  e.set_method(proto, "includes", [](Engine& e, Value self, Args args) {
    ObjectCell& c = array_self(e, self, "includes");
    Value x = arg(args, 0);
    return Value::boolean(std::any_of(c.elements.begin(), c.elements.end(),
                                      [&](const Value& v) { return strict_equals(v, x); }));
  });
  e.set_method(proto, "indexOf", [](Engine& e, Value self, Args args) {
    ObjectCell& c = array_self(e, self, "indexOf");
    Value x = arg(args, 0);
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
      if (strict_equals(c.elements[i], x)) return Value::number(static_cast<double>(i));
    }
    return Value::number(-1);
  });
  e.set_method(proto, "join", [](Engine& e, Value self, Args args) {
    ObjectCell& c = array_self(e, self, "join");
    std::string sep = args.empty() ? "," : e.display(args[0]);
    return Value::string(join_display(e, c.elements, sep));
  });
  e.set_method(proto, "slice", [](Engine& e, Value self, Args args) {
    ObjectCell& c = array_self(e, self, "slice");
    auto n = static_cast<double>(c.elements.size());
    auto clamp = [n](double x) { return x < 0 ? std::max(0.0, n + x) : std::min(x, n); };
    double from = args.size() > 0 ? clamp(number_arg(args, 0, "slice")) : 0;
    double to = args.size() > 1 ? clamp(number_arg(args, 1, "slice")) : n;
    std::vector<Value> out;
    for (auto i = static_cast<std::size_t>(from); i < static_cast<std::size_t>(to); ++i) out.push_back(c.elements[i]);
    return e.new_array(std::move(out));
  });
}

void install_math(Engine& e) {
  Value math = e.new_object();
  HeapId m = math.heap_id();
  auto unary = [&](const char* name, double (*f)(double)) {
    e.set_method(m, name, [name, f](Engine&, Value, Args args) { return Value::number(f(number_arg(args, 0, name))); });
  };
  unary("floor", [](double x) { return std::floor(x); });
  unary("ceil", [](double x) { return std::ceil(x); });
  unary("abs", [](double x) { return std::fabs(x); });
  unary("sqrt", [](double x) { return std::sqrt(x); });
  unary("round", [](double x) { return std::floor(x + 0.5); });
  unary("trunc", [](double x) { return std::trunc(x); });
  e.set_method(m, "min", [](Engine&, Value, Args args) {
    double r = INFINITY;
    for (std::size_t i = 0; i < args.size(); ++i) r = std::min(r, number_arg(args, i, "min"));
    return Value::number(r);
  });
  e.set_method(m, "max", [](Engine&, Value, Args args) {
    double r = -INFINITY;
    for (std::size_t i = 0; i < args.size(); ++i) r = std::max(r, number_arg(args, i, "max"));
    return Value::number(r);
  });
  e.set_method(m, "pow", [](Engine&, Value, Args args) {
    return Value::number(std::pow(number_arg(args, 0, "pow"), number_arg(args, 1, "pow")));
  });
  e.define_global("Math", math);
}

void install_aexpr_api(Engine& e) {
  HeapId proto = e.new_object().heap_id();
  e.set_prototype(HostKind::AExpr, proto);
  e.set_method(proto, "onChange", [](Engine& e, Value self, Args args) {
    AExprHandle h = handle_arg(e, self);
    h.on_change(e.wrap_callback(arg(args, 0)));
    return self;
  });
  e.set_method(proto, "now", [](Engine& e, Value self, Args) { return handle_arg(e, self).now(); });
  e.set_method(proto, "dispose", [](Engine& e, Value self, Args) {
    handle_arg(e, self).dispose();
    return Value();
  });

  HeapId tproto = e.new_object().heap_id();
  e.set_prototype(HostKind::Trigger, tproto);
  e.set_method(tproto, "onBecomeTrue", [](Engine& e, Value self, Args args) {
    Value fn = callable(arg(args, 0), "onBecomeTrue callback");
    on_become_true(e, handle_arg(e, self), [fn](Engine& e) { e.call(fn); });
    return self;
  });
  e.set_method(tproto, "onBecomeFalse", [](Engine& e, Value self, Args args) {
    Value fn = callable(arg(args, 0), "onBecomeFalse callback");
    on_become_false(e, handle_arg(e, self), [fn](Engine& e) { e.call(fn); });
    return self;
  });

  e.define_global("aexpr", e.new_native("aexpr", [](Engine& e, Value, Args args) {
    CreateOptions opts;
    opts.site = e.caller_scope();
    if (const Node* site = e.interpreter().call_site()) {
      opts.locals = site->locals;
      opts.has_locals = true;
    }
    AExprHandle h = e.create_aexpr(callable(arg(args, 0), "aexpr argument"), std::move(opts));
    return e.aexpr_object(h.id());
  }));
  e.define_global("trigger", e.new_native("trigger", [](Engine& e, Value, Args args) {
    return trigger_object(e, handle_arg(e, arg(args, 0)));
  }));
  e.define_global("check", e.new_native("check", [](Engine& e, Value, Args args) {
    if (args.empty() || args[0].is_nil()) return Value::number(e.check());
    Value list = args[0];
    if (!list.is_array()) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "check expects a list");
    std::vector<AExprHandle> subset;
    for (Value v : e.heap().object(list.heap_id()).elements) subset.push_back(handle_arg(e, v));
    return Value::number(e.check(subset));
  }));
}

void install_hooks(Engine& e) {
  e.define_global("reify_scope", e.new_native("reify_scope", [](Engine& e, Value, Args) {
    ScopePtr s = e.caller_scope();
    if (s->reified == kNoHeap) {
      Value obj = e.new_host_object(HostKind::Scope, s->id(), kNoHeap);
      e.heap().object(obj.heap_id()).scope = s;
      s->reified = obj.heap_id();
    }
    return Value::ref(ValueKind::Object, s->reified);
  }));
  e.define_global("get_local", e.new_native("get_local", [](Engine& e, Value, Args args) {
    return e.read_local(*host_scope(e, arg(args, 0)), name_arg(arg(args, 1)));
  }));
  e.define_global("set_local", e.new_native("set_local", [](Engine& e, Value, Args args) {
    Value v = arg(args, 2);
    e.write_local(*host_scope(e, arg(args, 0)), name_arg(arg(args, 1)), v);
    return v;
  }));
  e.define_global("get_global", e.new_native("get_global", [](Engine& e, Value, Args args) {
    return e.read_local(*e.main_scope(), name_arg(arg(args, 0)));
  }));
  e.define_global("set_global", e.new_native("set_global", [](Engine& e, Value, Args args) {
    Value v = arg(args, 1);
    e.write_local(*e.main_scope(), name_arg(arg(args, 0)), v);
    return v;
  }));
  e.define_global("get_member", e.new_native("get_member", [](Engine& e, Value, Args args) {
    PropKey key;
    Value obj = member_target(e, arg(args, 0), arg(args, 1), key);
    return e.read_member(obj, key);
  }));
  e.define_global("set_member", e.new_native("set_member", [](Engine& e, Value, Args args) {
    Value v = arg(args, 2);
    e.write_member(arg(args, 0), PropKey::from_value(arg(args, 1)), v);
    return v;
  }));
  e.define_global("call_member", e.new_native("call_member", [](Engine& e, Value, Args args) {
    PropKey key;
    Value obj = member_target(e, arg(args, 0), arg(args, 1), key);
    Value fn = e.read_member(obj, key);
    if (!fn.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "'" + key.text() + "' is not a function");
    return e.interpreter().invoke_method(obj, key, fn, args.size() > 2 ? args.subspan(2) : Args{});
  }));
}

}  // namespace

void install_core_builtins(Engine& e) {
  auto print = [](Engine& e, Value, Args args) {
    e.write_line(join_display(e, args, " "));
    return Value();
  };
  e.define_global("print", e.new_native("print", print));
  Value console = e.new_object();
  e.set_method(console.heap_id(), "log", print);
  e.define_global("console", console);
  e.define_global("assert", e.new_native("assert", [](Engine& e, Value, Args args) {
    if (!arg(args, 0).truthy()) {
      std::string msg = args.size() > 1 ? e.display(args[1]) : "assertion failed";
      throw RuntimeError(RuntimeErrorKind::AssertionFailed, msg);
    }
    return Value();
  }));
  e.define_global("str", e.new_native("str", [](Engine& e, Value, Args args) {
    return Value::string(e.display(arg(args, 0)));
  }));
  install_math(e);
  install_array_methods(e);
  install_aexpr_api(e);
  install_hooks(e);
}

}  // namespace rxl
