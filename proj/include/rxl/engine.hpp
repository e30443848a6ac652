#pragma once

#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rxl/ast.hpp"
#include "rxl/dependency.hpp"
#include "rxl/heap.hpp"
#include "rxl/value.hpp"

namespace rxl {

enum class StrategyKind : std::uint8_t { Convention, Interpretation, Compilation };

const char* strategy_name(StrategyKind k);
std::optional<StrategyKind> parse_strategy(std::string_view name);

using AExprId = std::uint64_t;
using Callback = std::function<void(Engine&, Value)>;

class Interpreter;
class Strategy;
class SignalSystem;
class ConstraintSystem;
class QuerySystem;
class LayerSystem;

struct AExpr {
  AExprId id = 0;
  Value thunk;
  // Scope of the aexpr() call and the local names visible there (interpretation's explicit scope).
  ScopePtr site;
  std::vector<Symbol> locals;
  bool has_locals = false;
  Value last;
  std::vector<Callback> callbacks;
  bool disposed = false;
  bool signal_monitor = false;
  std::vector<DependencyKey> deps;
  std::shared_ptr<void> state;
  HeapId object = kNoHeap;
  std::uint64_t evaluations = 0;
};

class AExprHandle {
 public:
  AExprHandle() = default;
  AExprHandle(Engine* engine, AExprId id) : engine_(engine), id_(id) {}

  AExprId id() const noexcept { return id_; }
  Engine* engine() const noexcept { return engine_; }
  bool valid() const noexcept { return engine_ != nullptr; }

  AExprHandle& on_change(Callback cb);
  Value now() const;
  bool maybe_changed();
  void dispose();
  bool disposed() const;
  std::vector<DependencyKey> dependencies() const;

  friend bool operator==(const AExprHandle& a, const AExprHandle& b) noexcept {
    return a.engine_ == b.engine_ && a.id_ == b.id_;
  }

 private:
  Engine* engine_ = nullptr;
  AExprId id_ = 0;
};

enum class FrameKind : std::uint8_t { Compilation, Interpretation };

struct AnalysisFrame {
  AExprId id = 0;
  FrameKind kind = FrameKind::Compilation;
  std::vector<DependencyKey> keys;
  // Slots created during the analysis are private to it and never recorded.
  std::uint64_t scope_mark = 0;
  HeapId heap_mark = 0;
  bool suspended = false;
};

struct CreateOptions {
  ScopePtr site;
  std::vector<Symbol> locals;
  bool has_locals = false;
  bool signal_monitor = false;
};

struct RunOptions {
  // Under Compilation, instrument the program before running it.
  bool rewrite = true;
  std::string preamble;
};

class Engine {
 public:
  explicit Engine(StrategyKind strategy = StrategyKind::Compilation);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  StrategyKind strategy() const noexcept { return kind_; }
  Strategy& strategy_impl() noexcept { return *strategy_; }

  // Programs.
  ProgramPtr prepare(std::string_view source, const RunOptions& opts = {}) const;
  Value run(std::string_view source, const RunOptions& opts = {});
  Value run_program(const ProgramPtr& program);
  Value call(Value fn, std::span<const Value> args = {}, Value self = Value());
  Value call(Value fn, std::initializer_list<Value> args, Value self = Value()) {
    return call(fn, std::span<const Value>(args.begin(), args.size()), self);
  }
  Interpreter& interpreter() noexcept { return *interpreter_; }

  // Output produced by print/console.log.
  void write_line(std::string_view line);
  const std::string& output() const noexcept { return out_; }
  std::string take_output();
  void set_echo(std::ostream* os) noexcept { echo_ = os; }

  // Heap, scopes, values.
  Heap& heap() noexcept { return heap_; }
  const Heap& heap() const noexcept { return heap_; }
  const ScopePtr& globals() const noexcept { return globals_; }
  // Top-level scope shared by every program unit run in this engine.
  const ScopePtr& main_scope() const noexcept { return main_; }
  ScopePtr new_scope(ScopePtr parent, std::string name = {});
  std::uint64_t next_scope_id() const noexcept { return next_scope_id_; }
  std::uint64_t next_decl_seq() noexcept { return next_decl_seq_++; }
  // Globals declared before this sequence number form the built-in library.
  std::uint64_t library_end() const noexcept { return library_end_; }

  Value new_object(HeapId proto = kNoHeap);
  Value new_array(std::vector<Value> elements = {});
  Value new_native(std::string_view name, NativeFn fn);
  Value new_closure(const Node& fn, ProgramPtr program, ScopePtr closure);
  Value new_expression(const Node& expr, ProgramPtr program, ScopePtr closure);
  Value bind(Value fn, std::vector<Value> args);
  Value new_host_object(HostKind kind, std::uint64_t id, HeapId proto);
  HeapId array_prototype() const noexcept { return array_proto_; }
  HeapId prototype(HostKind kind) const;
  void set_prototype(HostKind kind, HeapId proto);
  void set_method(HeapId obj, std::string_view name, NativeFn fn);

  void define_global(std::string_view name, Value v);
  Value global(std::string_view name) const;
  std::string display(Value v) const;

  // Untracked member load; BadMemberTarget for non-objects.
  Value load_member(Value obj, PropKey key) const;
  ObjectCell* object_cell(Value v) const;
  FunctionCell* function_cell(Value v) const;

  // Store mediation: every binding and property mutation goes through these two.
  // `hooked` marks writes performed by instrumentation hooks.
  void store_member(Value obj, PropKey key, Value v, bool hooked = false);
  void store_binding(Scope& scope, Scope::Binding& b, Value v, bool hooked = false);
  using WriteObserver = std::function<void(const DependencyKey&, Value)>;
  void set_write_observer(WriteObserver obs) { observer_ = std::move(obs); }

  // Tracked host-level access, visible to whichever strategy runs.
  Value read_member(Value obj, PropKey key);
  void write_member(Value obj, PropKey key, Value v);
  Value read_local(Scope& scope, Symbol name);
  void write_local(Scope& scope, Symbol name, Value v);
  DependencyKey binding_key(const Scope& owner, Symbol name) const;

  // Member read from plain evaluation; recorded only by interpretation analysis.
  Value load_member_interp(Value obj, PropKey key);

  // Analysis frames.
  void push_frame(AExprId id, FrameKind kind);
  AnalysisFrame pop_frame();
  AnalysisFrame* top_frame() noexcept { return frames_.empty() ? nullptr : &frames_.back(); }
  // Records into the innermost unsuspended frame, skipping slots created during the analysis.
  void record(const DependencyKey& k);
  bool recording(FrameKind kind) const noexcept {
    return !frames_.empty() && frames_.back().kind == kind && !frames_.back().suspended;
  }

  // Active expressions.
  AExprHandle create_aexpr(Value thunk, CreateOptions opts = {});
  AExpr* find_aexpr(AExprId id) noexcept;
  AExpr& live(const AExprHandle& h);
  bool maybe_changed(AExprId id);
  int check();
  int check(std::span<const AExprHandle> subset);
  void dispose(AExprId id);
  std::size_t live_count() const noexcept { return aexprs_.size(); }
  const std::map<AExprId, std::unique_ptr<AExpr>>& aexprs() const noexcept { return aexprs_; }
  Value aexpr_object(AExprId id);
  std::optional<AExprHandle> handle_from_value(Value v);
  Callback wrap_callback(Value fn);

  // Propagation.
  void post(std::vector<AExprId> ids);
  bool propagating() const noexcept { return draining_; }
  std::size_t max_rounds = 10000;

  class PropagationScope {
   public:
    explicit PropagationScope(Engine& e) : e_(e) { ++e_.hold_; }
    ~PropagationScope() {
      if (!done_) --e_.hold_;
    }
    // Releases the hold and runs anything queued meanwhile.
    void finish();

   private:
    Engine& e_;
    bool done_ = false;
  };

  // Subsystems.
  SignalSystem& signals() noexcept { return *signals_; }
  ConstraintSystem& constraints() noexcept { return *constraints_; }
  QuerySystem& queries() noexcept { return *queries_; }
  LayerSystem& layers() noexcept { return *layers_; }

  // Scope of the innermost active call into a native.
  const ScopePtr& caller_scope() const noexcept { return caller_scope_; }
  void set_caller_scope(ScopePtr s) noexcept { caller_scope_ = std::move(s); }

  std::uint64_t store_count() const noexcept { return stores_; }

 private:
  friend class AExprHandle;
  void install_builtins();
  void drain();
  void fire(AExpr& ae);
  void release_retired();

  StrategyKind kind_;
  Heap heap_;
  ScopePtr globals_;
  ScopePtr main_;
  std::uint64_t next_scope_id_ = 1;
  std::uint64_t next_decl_seq_ = 1;
  std::uint64_t library_end_ = 0;
  std::string out_;
  std::ostream* echo_ = nullptr;
  WriteObserver observer_;
  std::uint64_t stores_ = 0;
  HeapId array_proto_ = kNoHeap;
  std::map<HostKind, HeapId> protos_;
  ScopePtr caller_scope_;

  std::vector<AnalysisFrame> frames_;
  std::map<AExprId, std::unique_ptr<AExpr>> aexprs_;
  std::vector<std::unique_ptr<AExpr>> retired_;
  int callback_depth_ = 0;
  AExprId next_aexpr_ = 1;

  std::deque<std::vector<AExprId>> queue_;
  bool draining_ = false;
  int hold_ = 0;

  std::unique_ptr<Interpreter> interpreter_;
  std::unique_ptr<Strategy> strategy_;
  std::unique_ptr<SignalSystem> signals_;
  std::unique_ptr<ConstraintSystem> constraints_;
  std::unique_ptr<QuerySystem> queries_;
  std::unique_ptr<LayerSystem> layers_;
};

}  // namespace rxl
