#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "rxl/engine.hpp"

namespace rxl {

using ViewId = std::size_t;

class QuerySystem {
 public:
  explicit QuerySystem(Engine& engine) : engine_(engine) {}

  void install();
  void register_class(Value cls);
  void on_new_instance(Value cls, Value obj);

  ViewId select(Value cls, Value predicate);
  ViewId map(ViewId input, Value mapping);
  ViewId filter(ViewId input, Value predicate);
  const std::vector<Value>& items(ViewId view) const { return views_.at(view).items; }
  // Every instance ever constructed of a tracked class, in construction order.
  const std::vector<Value>& instances(Value cls) const;
  Value view_object(ViewId view);
  std::size_t view_count() const noexcept { return views_.size(); }

 private:
  enum class OpKind : std::uint8_t { Filter, Map };
  struct Operator {
    OpKind kind;
    ViewId input;
    ViewId output;
    Value fn;
    std::unordered_map<Value, AExprId> handles;
    std::unordered_map<Value, Value> mapped;
    // Map outputs stay in the view while at least one input maps to them.
    std::unordered_map<Value, std::size_t> refs;
  };
  struct View {
    std::vector<Value> items;
    std::vector<std::size_t> downstream;
    HeapId object = kNoHeap;
  };

  ViewId new_view();
  ViewId attach(OpKind kind, ViewId input, Value fn);
  void add(ViewId view, Value item);
  void remove(ViewId view, Value item);
  void feed(std::size_t op, Value item, bool added);

  Engine& engine_;
  std::vector<View> views_;
  std::vector<Operator> ops_;
  std::unordered_map<HeapId, ViewId> base_;
};

}  // namespace rxl
