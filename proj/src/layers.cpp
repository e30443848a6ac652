#include "rxl/layers.hpp"

#include <algorithm>

#include "rxl/triggers.hpp"

namespace rxl {

namespace {

LayerId layer_arg(Engine& e, Value v) {
  ObjectCell* c = e.object_cell(v);
  if (!c || c->host != HostKind::Layer) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "expected a layer");
  return static_cast<LayerId>(c->host_id);
}

Value arg(std::span<const Value> args, std::size_t i) { return i < args.size() ? args[i] : Value(); }

}  // namespace

void LayerSystem::install() {
  HeapId proto = engine_.new_object().heap_id();
  engine_.set_prototype(HostKind::Layer, proto);
  engine_.set_method(proto, "refineObject", [this](Engine& e, Value self, std::span<const Value> args) {
    refine_object(layer_arg(e, self), arg(args, 0), arg(args, 1));
    return self;
  });
  engine_.set_method(proto, "activeWhile", [this](Engine& e, Value self, std::span<const Value> args) {
    active_while(layer_arg(e, self), arg(args, 0));
    return self;
  });
  engine_.set_method(proto, "beGlobal", [this](Engine& e, Value self, std::span<const Value>) {
    be_global(layer_arg(e, self));
    return self;
  });
  engine_.set_method(proto, "beNotGlobal", [this](Engine& e, Value self, std::span<const Value>) {
    be_not_global(layer_arg(e, self));
    return self;
  });
  auto make = [this](Engine&, Value, std::span<const Value>) { return layer_object(create()); };
  engine_.define_global("layer", engine_.new_native("layer", make));
  engine_.define_global("Layer", engine_.new_native("Layer", make));
  engine_.define_global("proceed", engine_.new_native("proceed", [this](Engine&, Value, std::span<const Value> args) {
    return proceed(args);
  }));
}

LayerId LayerSystem::create() {
  layers_.emplace_back();
  return layers_.size() - 1;
}

Value LayerSystem::layer_object(LayerId layer) {
  Layer& l = layers_.at(layer);
  if (l.object == kNoHeap) {
    l.object = engine_.new_host_object(HostKind::Layer, layer, engine_.prototype(HostKind::Layer)).heap_id();
  }
  return Value::ref(ValueKind::Object, layers_[layer].object);
}

void LayerSystem::refine_object(LayerId layer, Value target, Value methods) {
  if (!target.has_properties()) {
    throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "refineObject expects an object, got " +
                                                              std::string(kind_name(target.kind())));
  }
  ObjectCell* m = engine_.object_cell(methods);
  if (!m) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "refineObject expects a method table");
  auto props = m->props;
  for (auto& [key, fn] : props) {
    if (!engine_.load_member(target, key).is_function()) {
      throw ReactiveError(ReactiveErrorKind::NoSuchBaseMethod, "refined object has no method '" + key.text() + "'");
    }
    if (!fn.is_function()) {
      throw RuntimeError(RuntimeErrorKind::NotCallable, "refinement '" + key.text() + "' is not a function");
    }
    auto [it, inserted] = layers_.at(layer).partials.insert_or_assign({target.heap_id(), key.raw()}, fn);
    if (inserted) ++refinements_;
  }
}

void LayerSystem::active_while(LayerId layer, Value condition) {
  layers_.at(layer);
  std::optional<AExprHandle> h = engine_.handle_from_value(condition);
  if (mode_ == Mode::Imperative) {
    Value fn = h ? engine_.live(*h).thunk : condition;
    if (!fn.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "layer condition is not a function");
    layers_[layer].conditions.push_back(fn);
    return;
  }
  if (!h) {
    if (!condition.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, "layer condition is not a function");
    CreateOptions opts;
    opts.site = engine_.caller_scope();
    h = engine_.create_aexpr(condition, std::move(opts));
  }
  on_become_true(engine_, *h, [this, layer](Engine&) { be_global(layer); });
  on_become_false(engine_, *h, [this, layer](Engine&) { be_not_global(layer); });
}

void LayerSystem::be_global(LayerId layer) {
  Layer& l = layers_.at(layer);
  if (l.global) return;
  l.global = true;
  activation_.push_back(layer);
}

void LayerSystem::be_not_global(LayerId layer) {
  Layer& l = layers_.at(layer);
  if (!l.global) return;
  l.global = false;
  activation_.erase(std::find(activation_.begin(), activation_.end(), layer));
}

std::vector<LayerId> LayerSystem::current_layers() {
  std::vector<LayerId> out = activation_;
  if (mode_ == Mode::Imperative) {
    for (LayerId id = 0; id < layers_.size(); ++id) {
      if (layers_[id].global || layers_[id].conditions.empty()) continue;
      std::vector<Value> conditions = layers_[id].conditions;
      bool on = std::all_of(conditions.begin(), conditions.end(),
                            [&](Value fn) { return engine_.call(fn).truthy(); });
      if (on) out.push_back(id);
    }
  }
  return out;
}

std::optional<Value> LayerSystem::dispatch(Value obj, PropKey key, Value base, std::span<const Value> args) {
  std::vector<LayerId> composition = current_layers();
  Frame f{{}, 0, obj, base};
  for (auto it = composition.rbegin(); it != composition.rend(); ++it) {
    auto& partials = layers_[*it].partials;
    if (auto p = partials.find({obj.heap_id(), key.raw()}); p != partials.end()) f.chain.push_back(p->second);
  }
  if (f.chain.empty()) return std::nullopt;
  stack_.push_back(std::move(f));
  try {
    Value r = step(stack_.back(), args);
    stack_.pop_back();
    return r;
  } catch (...) {
    stack_.pop_back();
    throw;
  }
}

Value LayerSystem::step(Frame& f, std::span<const Value> args) {
  std::size_t i = f.next++;
  Value self = f.self;
  Value fn = i < f.chain.size() ? f.chain[i] : f.base;
  return engine_.call(fn, args, self);
}

Value LayerSystem::proceed(std::span<const Value> args) {
  if (stack_.empty()) {
    throw ReactiveError(ReactiveErrorKind::NoSuchBaseMethod, "proceed called outside a layered method");
  }
  Frame& f = stack_.back();
  if (f.next > f.chain.size()) {
    throw ReactiveError(ReactiveErrorKind::NoSuchBaseMethod, "proceed called past the base method");
  }
  return step(f, args);
}

}  // namespace rxl
