#pragma once

#include <cstdint>
#include <set>
#include <string_view>
#include <vector>

#include "rxl/engine.hpp"

namespace rxl {

class SignalSystem {
 public:
  struct Signal {
    std::size_t id = 0;
    Symbol name = 0;
    ScopePtr scope;
    DependencyKey target;
    AExprId monitor = 0;
    std::uint64_t resolutions = 0;
  };

  explicit SignalSystem(Engine& engine) : engine_(engine) {}

  void define(const Node& decl, const ProgramPtr& program, const ScopePtr& env);
  bool pending() const noexcept { return !pending_.empty(); }
  // Re-runs every signal downstream of a fired monitor once, in topological order.
  void resolve();
  void clear_pending() noexcept { pending_.clear(); }

  const std::vector<Signal>& all() const noexcept { return signals_; }
  const Signal* find(std::string_view name) const;
  // Signals whose values the given signal's expression reads.
  std::vector<std::size_t> depends_on(std::size_t id) const;

 private:
  std::vector<std::vector<std::size_t>> edges() const;
  std::vector<std::size_t> order(const std::vector<bool>& affected,
                                 const std::vector<std::vector<std::size_t>>& out) const;

  Engine& engine_;
  std::vector<Signal> signals_;
  std::set<std::size_t> pending_;
};

}  // namespace rxl
