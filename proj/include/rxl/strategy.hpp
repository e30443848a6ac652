#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <unordered_map>
#include <vector>

#include "rxl/dependency.hpp"
#include "rxl/engine.hpp"

namespace rxl {

// Bidirectional key <-> aexpr index; both sides kept sorted and pruned.
class DependencyMap {
 public:
  // Replaces the keys of `id`; returns keys that gained or lost their last dependent.
  void assign(AExprId id, std::vector<DependencyKey> keys, std::vector<DependencyKey>* added = nullptr,
              std::vector<DependencyKey>* dropped = nullptr);
  void remove(AExprId id, std::vector<DependencyKey>* dropped = nullptr);
  const std::vector<AExprId>* dependents(const DependencyKey& k) const;
  const std::vector<DependencyKey>* keys(AExprId id) const;
  std::size_t key_count() const noexcept { return forward_.size(); }
  std::size_t aexpr_count() const noexcept { return reverse_.size(); }
  bool consistent() const;

 private:
  std::unordered_map<DependencyKey, std::vector<AExprId>> forward_;
  std::unordered_map<AExprId, std::vector<DependencyKey>> reverse_;
};

class Strategy {
 public:
  explicit Strategy(Engine& engine) : engine_(engine) {}
  virtual ~Strategy() = default;

  virtual StrategyKind kind() const noexcept = 0;
  // Seeds `ae.last` and registers the handle.
  virtual void attach(AExpr& ae) = 0;
  // Re-evaluates; dependency-tracking strategies refresh `ae.deps` as a side effect.
  virtual Value evaluate(AExpr& ae) = 0;
  virtual void detach(AExpr& ae) = 0;
  // A mediated store hit `key`; `cell` is the written object for member keys.
  virtual void on_store(const DependencyKey& key, const ObjectCell* cell, bool hooked) = 0;
  virtual std::size_t registry_size() const noexcept = 0;

 protected:
  Engine& engine_;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, Engine& engine);

class ConventionStrategy final : public Strategy {
 public:
  using Strategy::Strategy;
  StrategyKind kind() const noexcept override { return StrategyKind::Convention; }
  void attach(AExpr& ae) override;
  Value evaluate(AExpr& ae) override;
  void detach(AExpr& ae) override;
  void on_store(const DependencyKey&, const ObjectCell*, bool) override {}
  std::size_t registry_size() const noexcept override { return enabled_.size(); }
  const std::set<AExprId>& enabled() const noexcept { return enabled_; }

 private:
  std::set<AExprId> enabled_;
};

class InterpretationStrategy final : public Strategy {
 public:
  using Strategy::Strategy;
  StrategyKind kind() const noexcept override { return StrategyKind::Interpretation; }
  void attach(AExpr& ae) override;
  Value evaluate(AExpr& ae) override;
  void detach(AExpr& ae) override;
  void on_store(const DependencyKey& key, const ObjectCell* cell, bool hooked) override;
  std::size_t registry_size() const noexcept override { return interceptors_.aexpr_count(); }

  // One interceptor per armed member slot.
  std::size_t interceptor_count() const noexcept { return interceptors_.key_count(); }
  const DependencyMap& interceptors() const noexcept { return interceptors_; }

 private:
  void rearm(AExpr& ae, std::vector<DependencyKey> keys);
  DependencyMap interceptors_;
};

class CompilationStrategy final : public Strategy {
 public:
  using Strategy::Strategy;
  StrategyKind kind() const noexcept override { return StrategyKind::Compilation; }
  void attach(AExpr& ae) override;
  Value evaluate(AExpr& ae) override;
  void detach(AExpr& ae) override;
  void on_store(const DependencyKey& key, const ObjectCell* cell, bool hooked) override;
  std::size_t registry_size() const noexcept override { return map_.aexpr_count(); }
  const DependencyMap& map() const noexcept { return map_; }

 private:
  DependencyMap map_;
};

}  // namespace rxl
