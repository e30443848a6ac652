#include "rxl/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rxl/constraints.hpp"
#include "rxl/interpreter.hpp"
#include "rxl/layers.hpp"
#include "rxl/parser.hpp"
#include "rxl/queries.hpp"
#include "rxl/rewriter.hpp"
#include "rxl/signals.hpp"
#include "rxl/strategy.hpp"

namespace rxl {

void install_core_builtins(Engine& engine);

const char* strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::Convention: return "convention";
    case StrategyKind::Interpretation: return "interpretation";
    case StrategyKind::Compilation: return "compilation";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  if (name == "convention") return StrategyKind::Convention;
  if (name == "interpretation") return StrategyKind::Interpretation;
  if (name == "compilation") return StrategyKind::Compilation;
  return std::nullopt;
}

AExprHandle& AExprHandle::on_change(Callback cb) {
  engine_->live(*this).callbacks.push_back(std::move(cb));
  return *this;
}

Value AExprHandle::now() const { return engine_->live(*this).last; }

bool AExprHandle::maybe_changed() {
  engine_->live(*this);
  return engine_->maybe_changed(id_);
}

void AExprHandle::dispose() {
  if (engine_) engine_->dispose(id_);
}

bool AExprHandle::disposed() const {
  AExpr* ae = engine_ ? engine_->find_aexpr(id_) : nullptr;
  return !ae || ae->disposed;
}

std::vector<DependencyKey> AExprHandle::dependencies() const { return engine_->live(*this).deps; }

Engine::Engine(StrategyKind strategy) : kind_(strategy) {
  globals_ = std::make_shared<Scope>(next_scope_id_++, nullptr, "globals");
  main_ = std::make_shared<Scope>(next_scope_id_++, globals_, "main");
  interpreter_ = std::make_unique<Interpreter>(*this);
  strategy_ = make_strategy(strategy, *this);
  signals_ = std::make_unique<SignalSystem>(*this);
  constraints_ = std::make_unique<ConstraintSystem>(*this);
  queries_ = std::make_unique<QuerySystem>(*this);
  layers_ = std::make_unique<LayerSystem>(*this);
  install_builtins();
}

Engine::~Engine() = default;

void Engine::install_builtins() {
  array_proto_ = new_object().heap_id();
  install_core_builtins(*this);
  queries_->install();
  layers_->install();
  library_end_ = next_decl_seq_;
}

ProgramPtr Engine::prepare(std::string_view source, const RunOptions& opts) const {
  std::string text(source);
  if (!opts.preamble.empty()) {
    std::string_view rest = source.substr(std::min(source.find_first_not_of(" \t\r\n"), source.size()));
    std::string marker = quote_string(std::string(kHooksMarker));
    bool hooked = rest.substr(0, marker.size()) == marker;
    text = (hooked ? marker + ";\n" : std::string()) + opts.preamble + "\n" + text;
  }
  ProgramPtr program = parse(std::move(text));
  if (kind_ == StrategyKind::Compilation && opts.rewrite && !program->hooked) return rewrite(*program);
  return program;
}

Value Engine::run(std::string_view source, const RunOptions& opts) { return run_program(prepare(source, opts)); }

Value Engine::run_program(const ProgramPtr& program) { return interpreter_->run_program(program, main_); }

Value Engine::call(Value fn, std::span<const Value> args, Value self) { return interpreter_->call(fn, self, args); }

void Engine::write_line(std::string_view line) {
  out_.append(line);
  out_.push_back('\n');
  if (echo_) {
    *echo_ << line << '\n';
    echo_->flush();
  }
}

std::string Engine::take_output() { return std::exchange(out_, {}); }

ScopePtr Engine::new_scope(ScopePtr parent, std::string name) {
  return std::make_shared<Scope>(next_scope_id_++, std::move(parent), std::move(name));
}

Value Engine::new_object(HeapId proto) {
  auto [id, cell] = heap_.alloc_object(false);
  cell->proto = proto;
  return Value::ref(ValueKind::Object, id);
}

Value Engine::new_array(std::vector<Value> elements) {
  auto [id, cell] = heap_.alloc_object(true);
  cell->proto = array_proto_;
  cell->elements = std::move(elements);
  return Value::ref(ValueKind::Array, id);
}

Value Engine::new_native(std::string_view name, NativeFn fn) {
  auto [id, cell] = heap_.alloc<FunctionCell>();
  cell->fkind = FunctionKind::Native;
  cell->native = std::move(fn);
  cell->name = intern(name);
  return Value::ref(ValueKind::Function, id);
}

Value Engine::new_closure(const Node& fn, ProgramPtr program, ScopePtr closure) {
  auto [id, cell] = heap_.alloc<FunctionCell>();
  cell->fkind = FunctionKind::Closure;
  cell->node = &fn;
  cell->program = std::move(program);
  cell->closure = std::move(closure);
  cell->name = fn.symbol;
  return Value::ref(ValueKind::Function, id);
}

Value Engine::new_expression(const Node& expr, ProgramPtr program, ScopePtr closure) {
  auto [id, cell] = heap_.alloc<FunctionCell>();
  cell->fkind = FunctionKind::Expression;
  cell->node = &expr;
  cell->program = std::move(program);
  cell->closure = std::move(closure);
  return Value::ref(ValueKind::Function, id);
}

Value Engine::bind(Value fn, std::vector<Value> args) {
  auto [id, cell] = heap_.alloc<FunctionCell>();
  cell->fkind = FunctionKind::Bound;
  cell->target = fn;
  cell->bound_args = std::move(args);
  return Value::ref(ValueKind::Function, id);
}

Value Engine::new_host_object(HostKind kind, std::uint64_t id, HeapId proto) {
  Value obj = new_object(proto);
  ObjectCell& cell = heap_.object(obj.heap_id());
  cell.host = kind;
  cell.host_id = id;
  return obj;
}

HeapId Engine::prototype(HostKind kind) const {
  auto it = protos_.find(kind);
  return it == protos_.end() ? kNoHeap : it->second;
}

void Engine::set_prototype(HostKind kind, HeapId proto) { protos_[kind] = proto; }

void Engine::set_method(HeapId obj, std::string_view name, NativeFn fn) {
  Value f = new_native(name, std::move(fn));
  ObjectCell& cell = heap_.object(obj);
  PropKey key = PropKey::name(intern(name));
  if (Value* slot = cell.find_own(key)) {
    *slot = f;
  } else {
    cell.props.emplace_back(key, f);
  }
}

void Engine::define_global(std::string_view name, Value v) { globals_->declare(intern(name), v, next_decl_seq()); }

Value Engine::global(std::string_view name) const {
  Scope::Binding* b = main_->lookup(intern(name));
  if (!b) throw RuntimeError(RuntimeErrorKind::UndefinedVariable, "'" + std::string(name) + "' is not defined");
  return b->value;
}

namespace {

void display_into(const Engine& e, Value v, std::string& out, int depth, bool nested) {
  switch (v.kind()) {
    case ValueKind::Nil: out += "nil"; return;
    case ValueKind::Bool: out += v.as_bool() ? "true" : "false"; return;
    case ValueKind::Number: out += number_to_string(v.as_number()); return;
    case ValueKind::String:
      out += nested ? quote_string(symbol_text(v.as_symbol())) : symbol_text(v.as_symbol());
      return;
    case ValueKind::Function: {
      auto& f = e.heap().function(v.heap_id());
      out += f.name ? "<function " + symbol_text(f.name) + ">" : std::string("<function>");
      return;
    }
    case ValueKind::Class: out += "<class " + symbol_text(e.heap().klass(v.heap_id()).name) + ">"; return;
    case ValueKind::Array: {
      if (depth > 4) {
        out += "[...]";
        return;
      }
      auto& c = e.heap().object(v.heap_id());
      out += '[';
      for (std::size_t i = 0; i < c.elements.size(); ++i) {
        if (i) out += ", ";
        display_into(e, c.elements[i], out, depth + 1, true);
      }
      out += ']';
      return;
    }
    case ValueKind::Object: {
      auto& c = e.heap().object(v.heap_id());
      switch (c.host) {
        case HostKind::AExpr: out += "<aexpr " + std::to_string(c.host_id) + ">"; return;
        case HostKind::Trigger: out += "<trigger " + std::to_string(c.host_id) + ">"; return;
        case HostKind::View: out += "<view " + std::to_string(c.host_id) + ">"; return;
        case HostKind::Layer: out += "<layer " + std::to_string(c.host_id) + ">"; return;
        case HostKind::Scope: out += "<scope>"; return;
        case HostKind::None: break;
      }
      if (c.klass != kNoHeap) out += symbol_text(e.heap().klass(c.klass).name) + " ";
      if (depth > 4) {
        out += "{...}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto& [k, pv] : c.props) {
        if (!first) out += ", ";
        first = false;
        out += k.text() + ": ";
        display_into(e, pv, out, depth + 1, true);
      }
      out += '}';
      return;
    }
  }
}

}  // namespace

std::string Engine::display(Value v) const {
  std::string out;
  display_into(*this, v, out, 0, false);
  return out;
}

Value Engine::load_member(Value obj, PropKey key) const {
  if (obj.is_string() && key == PropKey::name(sym::length())) {
    return Value::number(static_cast<double>(symbol_text(obj.as_symbol()).size()));
  }
  if (!obj.has_properties()) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                       "cannot read '" + key.text() + "' of " + kind_name(obj.kind()));
  }
  ObjectCell* cell = &heap_.object(obj.heap_id());
  if (obj.is_array()) {
    if (key.is_index()) {
      std::uint32_t i = key.as_index();
      return i < cell->elements.size() ? cell->elements[i] : Value();
    }
    if (key.as_symbol() == sym::length()) return Value::number(static_cast<double>(cell->elements.size()));
  }
  for (;;) {
    if (Value* v = cell->find_own(key)) return *v;
    if (cell->proto == kNoHeap) return Value();
    cell = &heap_.object(cell->proto);
  }
}

ObjectCell* Engine::object_cell(Value v) const {
  return v.has_properties() ? &heap_.object(v.heap_id()) : nullptr;
}

FunctionCell* Engine::function_cell(Value v) const {
  return v.is_function() ? &heap_.function(v.heap_id()) : nullptr;
}

void Engine::store_member(Value obj, PropKey key, Value v, bool hooked) {
  if (!obj.has_properties()) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget,
                       "cannot set '" + key.text() + "' on " + kind_name(obj.kind()));
  }
  HeapId id = obj.heap_id();
  ObjectCell& cell = heap_.object(id);
  std::size_t old_size = cell.elements.size();
  bool resized = false;
  if (obj.is_array() && key.is_index()) {
    std::uint32_t i = key.as_index();
    if (i >= cell.elements.size()) {
      cell.elements.resize(static_cast<std::size_t>(i) + 1);
      resized = true;
    }
    cell.elements[i] = v;
  } else if (obj.is_array() && key.as_symbol() == sym::length()) {
    if (!v.is_number() || v.as_number() < 0 || v.as_number() != std::trunc(v.as_number())) {
      throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "invalid array length " + display(v));
    }
    cell.elements.resize(static_cast<std::size_t>(v.as_number()));
  } else if (Value* slot = cell.find_own(key)) {
    *slot = v;
  } else {
    cell.props.emplace_back(key, v);
  }
  ++stores_;
  DependencyKey k = DependencyKey::member(id, key);
  if (observer_) observer_(k, v);
  strategy_->on_store(k, &cell, hooked);
  if (resized) {
    strategy_->on_store(DependencyKey::member(id, PropKey::name(sym::length())), &cell, hooked);
  } else if (cell.elements.size() < old_size) {
    for (std::size_t i = cell.elements.size(); i < old_size; ++i) {
      strategy_->on_store(DependencyKey::member(id, PropKey::index(static_cast<std::uint32_t>(i))), &cell, hooked);
    }
  }
}

void Engine::store_binding(Scope& scope, Scope::Binding& b, Value v, bool hooked) {
  b.value = v;
  ++stores_;
  if (observer_ || hooked) {
    DependencyKey k = binding_key(scope, b.name);
    if (observer_) observer_(k, v);
    strategy_->on_store(k, nullptr, hooked);
  }
}

DependencyKey Engine::binding_key(const Scope& owner, Symbol name) const {
  if (&owner == globals_.get()) return DependencyKey::global(name);
  return DependencyKey::local(owner.id(), name);
}

Value Engine::read_member(Value obj, PropKey key) {
  Value v = load_member(obj, key);
  if (obj.has_properties()) record(DependencyKey::member(obj.heap_id(), key));
  return v;
}

void Engine::write_member(Value obj, PropKey key, Value v) { store_member(obj, key, v, true); }

Value Engine::read_local(Scope& scope, Symbol name) {
  Scope* owner = nullptr;
  Scope::Binding* b = scope.lookup(name, &owner);
  if (!b) throw RuntimeError(RuntimeErrorKind::UndefinedVariable, "'" + symbol_text(name) + "' is not defined");
  if (!frames_.empty() && (owner == globals_.get() || owner->id() < frames_.back().scope_mark)) {
    record(binding_key(*owner, name));
  }
  return b->value;
}

void Engine::write_local(Scope& scope, Symbol name, Value v) {
  Scope* owner = nullptr;
  Scope::Binding* b = scope.lookup(name, &owner);
  if (!b) throw RuntimeError(RuntimeErrorKind::UndefinedVariable, "'" + symbol_text(name) + "' is not defined");
  store_binding(*owner, *b, v, true);
}

Value Engine::load_member_interp(Value obj, PropKey key) {
  Value v = load_member(obj, key);
  if (!frames_.empty()) {
    AnalysisFrame& f = frames_.back();
    if (f.kind == FrameKind::Interpretation && !f.suspended && obj.has_properties() &&
        obj.heap_id() < f.heap_mark) {
      f.keys.push_back(DependencyKey::member(obj.heap_id(), key));
    }
  }
  return v;
}

void Engine::push_frame(AExprId id, FrameKind kind) {
  AnalysisFrame f;
  f.id = id;
  f.kind = kind;
  f.scope_mark = next_scope_id_;
  f.heap_mark = heap_.size();
  frames_.push_back(std::move(f));
}

AnalysisFrame Engine::pop_frame() {
  AnalysisFrame f = std::move(frames_.back());
  frames_.pop_back();
  std::sort(f.keys.begin(), f.keys.end());
  f.keys.erase(std::unique(f.keys.begin(), f.keys.end()), f.keys.end());
  return f;
}

void Engine::record(const DependencyKey& k) {
  if (frames_.empty()) return;
  AnalysisFrame& f = frames_.back();
  if (f.suspended) return;
  if (k.kind == DependencyKey::Kind::Member && k.object() >= f.heap_mark) return;
  if (k.kind == DependencyKey::Kind::Local && k.scope() >= f.scope_mark) return;
  f.keys.push_back(k);
}

AExprHandle Engine::create_aexpr(Value thunk, CreateOptions opts) {
  if (!thunk.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "aexpr expects a function");
  auto ae = std::make_unique<AExpr>();
  ae->id = next_aexpr_++;
  ae->thunk = thunk;
  ae->site = std::move(opts.site);
  ae->locals = std::move(opts.locals);
  ae->has_locals = opts.has_locals;
  ae->signal_monitor = opts.signal_monitor;
  try {
    strategy_->attach(*ae);
  } catch (...) {
    strategy_->detach(*ae);
    throw;
  }
  ++ae->evaluations;
  AExprId id = ae->id;
  aexprs_.emplace(id, std::move(ae));
  return AExprHandle(this, id);
}

AExpr* Engine::find_aexpr(AExprId id) noexcept {
  auto it = aexprs_.find(id);
  return it == aexprs_.end() ? nullptr : it->second.get();
}

AExpr& Engine::live(const AExprHandle& h) {
  if (h.engine() != this) throw ReactiveError(ReactiveErrorKind::ForeignHandle, "handle belongs to another engine");
  AExpr* ae = find_aexpr(h.id());
  if (!ae || ae->disposed) {
    throw ReactiveError(ReactiveErrorKind::DisposedHandle, "active expression " + std::to_string(h.id()) +
                                                               " has been disposed");
  }
  return *ae;
}

bool Engine::maybe_changed(AExprId id) {
  AExpr* ae = find_aexpr(id);
  if (!ae || ae->disposed) return false;
  Value v = strategy_->evaluate(*ae);
  ++ae->evaluations;
  if (v == ae->last) return false;
  ae->last = v;
  fire(*ae);
  return true;
}

void Engine::fire(AExpr& ae) {
  std::exception_ptr first;
  ++callback_depth_;
  Value v = ae.last;
  for (std::size_t i = 0; i < ae.callbacks.size() && !ae.disposed; ++i) {
    Callback cb = ae.callbacks[i];
    try {
      cb(*this, v);
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  --callback_depth_;
  release_retired();
  if (first) std::rethrow_exception(first);
}

void Engine::release_retired() {
  if (callback_depth_ == 0 && !draining_) retired_.clear();
}

int Engine::check() {
  std::vector<AExprHandle> all;
  all.reserve(aexprs_.size());
  for (auto& [id, ae] : aexprs_) all.emplace_back(this, id);
  return check(all);
}

int Engine::check(std::span<const AExprHandle> subset) {
  std::vector<AExprId> ids;
  for (auto& h : subset) {
    if (h.engine() != this) throw ReactiveError(ReactiveErrorKind::ForeignHandle, "handle belongs to another engine");
    ids.push_back(h.id());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  int fired = 0;
  std::exception_ptr first;
  PropagationScope hold(*this);
  for (AExprId id : ids) {
    try {
      if (maybe_changed(id)) ++fired;
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  try {
    hold.finish();
  } catch (...) {
    if (!first) first = std::current_exception();
  }
  if (first) std::rethrow_exception(first);
  return fired;
}

void Engine::dispose(AExprId id) {
  auto it = aexprs_.find(id);
  if (it == aexprs_.end()) return;
  it->second->disposed = true;
  strategy_->detach(*it->second);
  retired_.push_back(std::move(it->second));
  aexprs_.erase(it);
  release_retired();
}

Value Engine::aexpr_object(AExprId id) {
  AExpr* ae = find_aexpr(id);
  if (!ae) throw ReactiveError(ReactiveErrorKind::DisposedHandle, "active expression has been disposed");
  if (ae->object == kNoHeap) ae->object = new_host_object(HostKind::AExpr, id, prototype(HostKind::AExpr)).heap_id();
  return Value::ref(ValueKind::Object, ae->object);
}

std::optional<AExprHandle> Engine::handle_from_value(Value v) {
  if (!v.is_object()) return std::nullopt;
  ObjectCell& c = heap_.object(v.heap_id());
  if (c.host != HostKind::AExpr && c.host != HostKind::Trigger) return std::nullopt;
  return AExprHandle(this, c.host_id);
}

Callback Engine::wrap_callback(Value fn) {
  if (!fn.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "callback is not a function");
  return [fn](Engine& e, Value v) { e.call(fn, {v}); };
}

void Engine::post(std::vector<AExprId> ids) {
  if (ids.empty()) return;
  queue_.push_back(std::move(ids));
  drain();
}

void Engine::PropagationScope::finish() {
  if (done_) return;
  done_ = true;
  --e_.hold_;
  e_.drain();
}

void Engine::drain() {
  if (draining_ || hold_ > 0) return;
  draining_ = true;
  std::exception_ptr first;
  std::size_t rounds = 0;
  auto attempt = [&](auto&& fn) {
    try {
      fn();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  };
  while (!queue_.empty() || signals_->pending()) {
    if (++rounds > max_rounds) {
      queue_.clear();
      signals_->clear_pending();
      draining_ = false;
      release_retired();
      throw ReactiveError(ReactiveErrorKind::PropagationLoop,
                          "propagation exceeded " + std::to_string(max_rounds) + " rounds");
    }
    std::vector<AExprId> batch;
    if (!queue_.empty()) {
      batch = std::move(queue_.front());
      queue_.pop_front();
    }
    for (AExprId id : batch) {
      AExpr* ae = find_aexpr(id);
      if (ae && ae->signal_monitor) attempt([&] { maybe_changed(id); });
    }
    if (signals_->pending()) attempt([&] { signals_->resolve(); });
    for (AExprId id : batch) {
      AExpr* ae = find_aexpr(id);
      if (ae && !ae->signal_monitor) attempt([&] { maybe_changed(id); });
    }
  }
  draining_ = false;
  release_retired();
  if (first) std::rethrow_exception(first);
}

}  // namespace rxl
