#pragma once

#include <span>
#include <vector>

#include "rxl/ast.hpp"
#include "rxl/heap.hpp"

namespace rxl {

class Engine;

// Tree-walking evaluator shared by all strategies.
class Interpreter {
 public:
  explicit Interpreter(Engine& engine) : engine_(engine) {}

  Value run_program(const ProgramPtr& program, const ScopePtr& scope);
  Value call(Value fn, Value self, std::span<const Value> args);
  // Invokes the function literal `fn` as if it were a closure over `env`.
  Value call_node(const Node& fn, const ProgramPtr& program, const ScopePtr& env, Value self,
                  std::span<const Value> args);
  Value eval_expression(const Node& expr, const ProgramPtr& program, const ScopePtr& env);
  // Calls a method found on `obj`, honoring layer refinements.
  Value invoke_method(Value obj, PropKey key, Value fn, std::span<const Value> args);

  // The `aexpr(...)` call node currently being evaluated, if any.
  const Node* call_site() const noexcept { return call_site_; }
  std::size_t depth() const noexcept { return depth_; }
  static constexpr std::size_t kMaxDepth = 1500;

 private:
  enum class Flow { Normal, Return };

  Flow exec(const Node& n, const ScopePtr& env);
  Flow exec_list(const Node& block, const ScopePtr& env, bool top = false, std::size_t skip = 0);
  void hoist(const Node& block, const ScopePtr& env);
  Value eval(const Node& n, const ScopePtr& env);
  Value eval_call(const Node& n, const ScopePtr& env);
  Value eval_new(const Node& n, const ScopePtr& env);
  Value eval_assign(const Node& n, const ScopePtr& env);
  Value eval_update(const Node& n, const ScopePtr& env);
  Value eval_class(const Node& n, const ScopePtr& env);
  Value member_get(Value obj, PropKey key, const Node& at);
  Scope::Binding& resolve(const ScopePtr& env, Symbol name, const Node& at, Scope** owner);
  void args_into(const Node& n, std::size_t from, const ScopePtr& env, std::vector<Value>& out);

  Engine& engine_;
  ProgramPtr program_;
  Value ret_;
  Value last_;
  std::size_t depth_ = 0;
  const Node* call_site_ = nullptr;
  const Node* top_block_ = nullptr;
};

Value binary_op(Engine& engine, Op op, Value a, Value b, SourcePos pos = {});

}  // namespace rxl
