#include <algorithm>
#include <set>

#include "rxl/interpreter.hpp"
#include "rxl/parser.hpp"
#include "rxl/strategy.hpp"

namespace rxl {

namespace {

template <class T>
void sorted_insert(std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

template <class T>
bool sorted_erase(std::vector<T>& v, const T& x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) return false;
  v.erase(it);
  return true;
}

// Runs `fn` inside an analysis frame and returns the recorded keys.
template <class F>
std::vector<DependencyKey> analyse(Engine& engine, AExprId id, FrameKind kind, Value& out, F&& fn) {
  engine.push_frame(id, kind);
  try {
    out = fn();
  } catch (...) {
    engine.pop_frame();
    throw;
  }
  return engine.pop_frame().keys;
}

struct InterpInstance {
  ProgramPtr program;
  const Node* fn = nullptr;
  ScopePtr scope;
};

// Copies a host library value into an interpreter realm: natives become bridges, plain library
// objects are copied one level deep.
Value bridge(Engine& e, Value v, int depth) {
  if (FunctionCell* f = e.function_cell(v); f && f->fkind == FunctionKind::Native) {
    return e.new_native(symbol_text(f->name),
                        [v](Engine& e, Value self, std::span<const Value> args) { return e.call(v, args, self); });
  }
  ObjectCell* o = e.object_cell(v);
  if (depth == 0 || !o || v.kind() != ValueKind::Object || o->host != HostKind::None) return v;
  std::vector<std::pair<PropKey, Value>> props = o->props;
  Value copy = e.new_object(o->proto);
  for (auto& [k, x] : props) e.heap().object(copy.heap_id()).props.emplace_back(k, bridge(e, x, depth - 1));
  return copy;
}

// Global environment of one interpreter instance, holding its own copy of the standard library.
void collect_identifiers(const Node& n, std::set<Symbol>& out) {
  if (n.kind == NodeKind::Ident) out.insert(n.symbol);
  for (std::size_t i = 0; i < n.children.size(); ++i) collect_identifiers(n.child(i), out);
}

ScopePtr new_realm(Engine& e) {
  ScopePtr realm = e.new_scope(e.main_scope(), "realm");
  for (const Scope::Binding& b : e.globals()->bindings()) {
    if (b.decl_seq >= e.library_end() || e.main_scope()->find_local(b.name)) continue;
    realm->declare(b.name, bridge(e, b.value, 1), b.decl_seq);
  }
  return realm;
}

}  // namespace

void DependencyMap::assign(AExprId id, std::vector<DependencyKey> keys, std::vector<DependencyKey>* added,
                           std::vector<DependencyKey>* dropped) {
  auto& old = reverse_[id];
  auto oi = old.begin();
  auto ni = keys.begin();
  while (oi != old.end() || ni != keys.end()) {
    if (ni == keys.end() || (oi != old.end() && *oi < *ni)) {
      auto f = forward_.find(*oi);
      sorted_erase(f->second, id);
      if (f->second.empty()) {
        if (dropped) dropped->push_back(*oi);
        forward_.erase(f);
      }
      ++oi;
    } else if (oi == old.end() || *ni < *oi) {
      auto& subs = forward_[*ni];
      if (subs.empty() && added) added->push_back(*ni);
      sorted_insert(subs, id);
      ++ni;
    } else {
      ++oi;
      ++ni;
    }
  }
  if (keys.empty()) {
    reverse_.erase(id);
  } else {
    old = std::move(keys);
  }
}

void DependencyMap::remove(AExprId id, std::vector<DependencyKey>* dropped) {
  assign(id, {}, nullptr, dropped);
  reverse_.erase(id);
}

const std::vector<AExprId>* DependencyMap::dependents(const DependencyKey& k) const {
  auto it = forward_.find(k);
  return it == forward_.end() ? nullptr : &it->second;
}

const std::vector<DependencyKey>* DependencyMap::keys(AExprId id) const {
  auto it = reverse_.find(id);
  return it == reverse_.end() ? nullptr : &it->second;
}

bool DependencyMap::consistent() const {
  std::size_t pairs = 0;
  for (auto& [k, ids] : forward_) {
    if (ids.empty() || !std::is_sorted(ids.begin(), ids.end())) return false;
    for (AExprId id : ids) {
      auto r = reverse_.find(id);
      if (r == reverse_.end() || !std::binary_search(r->second.begin(), r->second.end(), k)) return false;
    }
    pairs += ids.size();
  }
  std::size_t back = 0;
  for (auto& [id, ks] : reverse_) {
    if (ks.empty() || !std::is_sorted(ks.begin(), ks.end())) return false;
    back += ks.size();
  }
  return pairs == back;
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, Engine& engine) {
  switch (kind) {
    case StrategyKind::Convention: return std::make_unique<ConventionStrategy>(engine);
    case StrategyKind::Interpretation: return std::make_unique<InterpretationStrategy>(engine);
    case StrategyKind::Compilation: return std::make_unique<CompilationStrategy>(engine);
  }
  return nullptr;
}

void ConventionStrategy::attach(AExpr& ae) {
  enabled_.insert(ae.id);
  ae.last = evaluate(ae);
}

Value ConventionStrategy::evaluate(AExpr& ae) { return engine_.call(ae.thunk); }

void ConventionStrategy::detach(AExpr& ae) { enabled_.erase(ae.id); }

void InterpretationStrategy::attach(AExpr& ae) {
  auto inst = std::make_shared<InterpInstance>();
  FunctionCell* f = engine_.function_cell(ae.thunk);
  if (f && f->fkind == FunctionKind::Closure && ae.has_locals && f->program && f->program->source) {
    const Span& span = f->node->span;
    inst->program = parse("(" + f->program->source->substr(span.begin, span.end - span.begin) + ");");
    inst->fn = &inst->program->root->child(0).child(0);
    inst->scope = engine_.new_scope(new_realm(engine_), "locals");
    std::set<Symbol> names;
    collect_identifiers(*f->node, names);
    for (Symbol name : names) {
      Scope* owner = nullptr;
      Scope::Binding* b = f->closure ? f->closure->lookup(name, &owner) : nullptr;
      if (b && owner != engine_.main_scope().get() && owner != engine_.globals().get()) {
        inst->scope->declare(name, b->value, b->decl_seq);
      }
    }
  }
  ae.state = inst;
  ae.last = evaluate(ae);
}

Value InterpretationStrategy::evaluate(AExpr& ae) {
  auto* inst = static_cast<InterpInstance*>(ae.state.get());
  Value v;
  auto keys = analyse(engine_, ae.id, FrameKind::Interpretation, v, [&] {
    if (inst && inst->fn) {
      return engine_.interpreter().call_node(*inst->fn, inst->program, inst->scope, Value(), {});
    }
    return engine_.call(ae.thunk);
  });
  std::erase_if(keys, [](const DependencyKey& k) { return k.kind != DependencyKey::Kind::Member; });
  rearm(ae, std::move(keys));
  return v;
}

void InterpretationStrategy::rearm(AExpr& ae, std::vector<DependencyKey> keys) {
  std::vector<DependencyKey> added, dropped;
  ae.deps = keys;
  interceptors_.assign(ae.id, std::move(keys), &added, &dropped);
  for (auto& k : added) ++engine_.heap().object(k.object()).intercepted;
  for (auto& k : dropped) --engine_.heap().object(k.object()).intercepted;
}

void InterpretationStrategy::detach(AExpr& ae) {
  std::vector<DependencyKey> dropped;
  interceptors_.remove(ae.id, &dropped);
  for (auto& k : dropped) --engine_.heap().object(k.object()).intercepted;
  ae.deps.clear();
}

void InterpretationStrategy::on_store(const DependencyKey& key, const ObjectCell* cell, bool) {
  if (!cell || cell->intercepted == 0) return;
  if (auto* subs = interceptors_.dependents(key)) engine_.post(*subs);
}

void CompilationStrategy::attach(AExpr& ae) { ae.last = evaluate(ae); }

Value CompilationStrategy::evaluate(AExpr& ae) {
  Value v;
  auto keys = analyse(engine_, ae.id, FrameKind::Compilation, v, [&] { return engine_.call(ae.thunk); });
  ae.deps = keys;
  map_.assign(ae.id, std::move(keys));
  return v;
}

void CompilationStrategy::detach(AExpr& ae) {
  map_.remove(ae.id);
  ae.deps.clear();
}

void CompilationStrategy::on_store(const DependencyKey& key, const ObjectCell*, bool hooked) {
  if (!hooked) return;
  if (auto* subs = map_.dependents(key)) engine_.post(*subs);
}

}  // namespace rxl
