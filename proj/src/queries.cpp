#include "rxl/queries.hpp"

#include <algorithm>

#include "rxl/triggers.hpp"

namespace rxl {

namespace {

ViewId view_arg(Engine& e, Value v) {
  ObjectCell* c = e.object_cell(v);
  if (!c || c->host != HostKind::View) throw RuntimeError(RuntimeErrorKind::BadMemberTarget, "expected a view");
  return static_cast<ViewId>(c->host_id);
}

Value fn_arg(std::span<const Value> args, std::size_t i, const char* what) {
  Value v = i < args.size() ? args[i] : Value();
  if (!v.is_function()) throw RuntimeError(RuntimeErrorKind::NotCallable, std::string(what) + " is not a function");
  return v;
}

}  // namespace

void QuerySystem::install() {
  HeapId proto = engine_.new_object().heap_id();
  engine_.set_prototype(HostKind::View, proto);
  engine_.set_method(proto, "map", [this](Engine& e, Value self, std::span<const Value> args) {
    return view_object(map(view_arg(e, self), fn_arg(args, 0, "map function")));
  });
  engine_.set_method(proto, "filter", [this](Engine& e, Value self, std::span<const Value> args) {
    return view_object(filter(view_arg(e, self), fn_arg(args, 0, "filter predicate")));
  });
  engine_.set_method(proto, "items", [this](Engine& e, Value self, std::span<const Value>) {
    return e.new_array(items(view_arg(e, self)));
  });
  engine_.set_method(proto, "size", [this](Engine& e, Value self, std::span<const Value>) {
    return Value::number(static_cast<double>(items(view_arg(e, self)).size()));
  });
  engine_.define_global("select", engine_.new_native("select", [this](Engine&, Value, std::span<const Value> args) {
    Value cls = args.empty() ? Value() : args[0];
    return view_object(select(cls, fn_arg(args, 1, "select predicate")));
  }));
}

ViewId QuerySystem::new_view() {
  views_.emplace_back();
  return views_.size() - 1;
}

void QuerySystem::register_class(Value cls) {
  if (!base_.count(cls.heap_id())) base_.emplace(cls.heap_id(), new_view());
}

const std::vector<Value>& QuerySystem::instances(Value cls) const {
  static const std::vector<Value> none;
  auto it = cls.is_class() ? base_.find(cls.heap_id()) : base_.end();
  return it == base_.end() ? none : views_[it->second].items;
}

void QuerySystem::on_new_instance(Value cls, Value obj) {
  auto it = base_.find(cls.heap_id());
  if (it != base_.end()) add(it->second, obj);
}

Value QuerySystem::view_object(ViewId view) {
  View& v = views_.at(view);
  if (v.object == kNoHeap) {
    v.object = engine_.new_host_object(HostKind::View, view, engine_.prototype(HostKind::View)).heap_id();
  }
  return Value::ref(ValueKind::Object, views_[view].object);
}

ViewId QuerySystem::select(Value cls, Value predicate) {
  auto it = cls.is_class() ? base_.find(cls.heap_id()) : base_.end();
  if (it == base_.end()) {
    throw ReactiveError(ReactiveErrorKind::UntrackedClass,
                        "select expects a tracked class, got " + engine_.display(cls));
  }
  return attach(OpKind::Filter, it->second, predicate);
}

ViewId QuerySystem::map(ViewId input, Value mapping) { return attach(OpKind::Map, input, mapping); }

ViewId QuerySystem::filter(ViewId input, Value predicate) { return attach(OpKind::Filter, input, predicate); }

ViewId QuerySystem::attach(OpKind kind, ViewId input, Value fn) {
  views_.at(input);
  ViewId output = new_view();
  std::size_t op = ops_.size();
  ops_.push_back(Operator{kind, input, output, fn, {}, {}, {}});
  views_[input].downstream.push_back(op);
  std::vector<Value> existing = views_[input].items;
  for (Value item : existing) feed(op, item, true);
  return output;
}

void QuerySystem::add(ViewId view, Value item) {
  auto& items = views_[view].items;
  if (std::find(items.begin(), items.end(), item) != items.end()) return;
  items.push_back(item);
  std::vector<std::size_t> ops = views_[view].downstream;
  for (std::size_t op : ops) feed(op, item, true);
}

void QuerySystem::remove(ViewId view, Value item) {
  auto& items = views_[view].items;
  auto it = std::find(items.begin(), items.end(), item);
  if (it == items.end()) return;
  items.erase(it);
  std::vector<std::size_t> ops = views_[view].downstream;
  for (std::size_t op : ops) feed(op, item, false);
}

void QuerySystem::feed(std::size_t op, Value item, bool added) {
  Operator& o = ops_[op];
  ViewId output = o.output;
  if (o.kind == OpKind::Map) {
    if (added) {
      Value m = engine_.call(o.fn, {item});
      ops_[op].mapped[item] = m;
      if (ops_[op].refs[m]++ == 0) add(output, m);
    } else if (auto it = o.mapped.find(item); it != o.mapped.end()) {
      Value m = it->second;
      o.mapped.erase(it);
      if (--o.refs[m] == 0) {
        o.refs.erase(m);
        remove(output, m);
      }
    }
    return;
  }
  if (!added) {
    if (auto it = o.handles.find(item); it != o.handles.end()) {
      AExprId id = it->second;
      o.handles.erase(it);
      engine_.dispose(id);
    }
    remove(output, item);
    return;
  }
  CreateOptions opts;
  AExprHandle h = engine_.create_aexpr(engine_.bind(o.fn, {item}), std::move(opts));
  ops_[op].handles[item] = h.id();
  on_become_true(engine_, h, [this, output, item](Engine&) { add(output, item); });
  on_become_false(engine_, h, [this, output, item](Engine&) { remove(output, item); });
}

}  // namespace rxl
