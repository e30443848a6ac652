#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rxl/ast.hpp"
#include "rxl/value.hpp"

namespace rxl {

class Engine;

inline constexpr HeapId kNoHeap = 0xffffffffu;

class Scope {
 public:
  struct Binding {
    Symbol name;
    Value value;
    std::uint64_t decl_seq;
  };

  Scope(std::uint64_t id, std::shared_ptr<Scope> parent, std::string name = {})
      : id_(id), parent_(std::move(parent)), name_(std::move(name)) {}

  std::uint64_t id() const noexcept { return id_; }
  const std::shared_ptr<Scope>& parent() const noexcept { return parent_; }
  const std::string& name() const noexcept { return name_; }

  Binding* find_local(Symbol s) noexcept;
  // Walks the parent chain; `owner` receives the declaring scope.
  Binding* lookup(Symbol s, Scope** owner = nullptr) noexcept;
  Binding& declare(Symbol s, Value v, std::uint64_t seq);
  const std::vector<Binding>& bindings() const noexcept { return bindings_; }

  HeapId reified = kNoHeap;

 private:
  std::uint64_t id_;
  std::shared_ptr<Scope> parent_;
  std::string name_;
  std::vector<Binding> bindings_;
  std::unique_ptr<std::unordered_map<Symbol, std::uint32_t>> index_;
};

using ScopePtr = std::shared_ptr<Scope>;

enum class HostKind : std::uint8_t { None, Scope, AExpr, Trigger, View, Layer };

using NativeFn = std::function<Value(Engine&, Value self, std::span<const Value> args)>;

enum class FunctionKind : std::uint8_t { Closure, Expression, Bound, Native };

struct Cell {
  explicit Cell(ValueKind k) : kind(k) {}
  virtual ~Cell() = default;
  ValueKind kind;
};

struct ObjectCell : Cell {
  explicit ObjectCell(bool array = false) : Cell(array ? ValueKind::Array : ValueKind::Object) {}
  std::vector<std::pair<PropKey, Value>> props;
  std::vector<Value> elements;
  HeapId proto = kNoHeap;
  HeapId klass = kNoHeap;
  // Armed property interceptors on this object.
  std::uint32_t intercepted = 0;
  HostKind host = HostKind::None;
  std::uint64_t host_id = 0;
  std::weak_ptr<Scope> scope;

  Value* find_own(PropKey k) noexcept {
    for (auto& [key, v] : props) {
      if (key == k) return &v;
    }
    return nullptr;
  }
};

struct FunctionCell : Cell {
  FunctionCell() : Cell(ValueKind::Function) {}
  FunctionKind fkind = FunctionKind::Closure;
  const Node* node = nullptr;
  ProgramPtr program;
  ScopePtr closure;
  NativeFn native;
  Symbol name = 0;
  Value target;
  std::vector<Value> bound_args;
};

struct ClassCell : Cell {
  ClassCell() : Cell(ValueKind::Class) {}
  Symbol name = 0;
  HeapId prototype = kNoHeap;
  Value constructor;
};

class Heap {
 public:
  HeapId size() const noexcept { return static_cast<HeapId>(cells_.size()); }

  template <class T>
  std::pair<HeapId, T*> alloc() {
    auto cell = std::make_unique<T>();
    T* raw = cell.get();
    cells_.push_back(std::move(cell));
    return {static_cast<HeapId>(cells_.size() - 1), raw};
  }
  std::pair<HeapId, ObjectCell*> alloc_object(bool array) {
    auto cell = std::make_unique<ObjectCell>(array);
    ObjectCell* raw = cell.get();
    cells_.push_back(std::move(cell));
    return {static_cast<HeapId>(cells_.size() - 1), raw};
  }

  Cell& cell(HeapId id) const { return *cells_[id]; }
  ObjectCell& object(HeapId id) const { return static_cast<ObjectCell&>(*cells_[id]); }
  FunctionCell& function(HeapId id) const { return static_cast<FunctionCell&>(*cells_[id]); }
  ClassCell& klass(HeapId id) const { return static_cast<ClassCell&>(*cells_[id]); }

 private:
  std::vector<std::unique_ptr<Cell>> cells_;
};

}  // namespace rxl
