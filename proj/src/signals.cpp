#include "rxl/signals.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <unordered_map>

#include "rxl/strategy.hpp"

namespace rxl {

void SignalSystem::define(const Node& decl, const ProgramPtr& program, const ScopePtr& env) {
  if (engine_.strategy() != StrategyKind::Compilation) {
    throw ReactiveError(ReactiveErrorKind::UnsupportedStrategy,
                        std::string("signals require the compilation strategy, engine runs ") +
                            strategy_name(engine_.strategy()));
  }
  env->declare(decl.symbol, Value(), engine_.next_decl_seq());
  Value thunk = engine_.new_expression(decl.child(0), program, env);
  CreateOptions opts;
  opts.site = env;
  opts.signal_monitor = true;
  AExprHandle h = engine_.create_aexpr(thunk, std::move(opts));
  std::size_t id = signals_.size();
  Signal s;
  s.id = id;
  s.name = decl.symbol;
  s.scope = env;
  s.target = engine_.binding_key(*env, decl.symbol);
  s.monitor = h.id();
  signals_.push_back(std::move(s));
  env->find_local(decl.symbol)->value = h.now();
  h.on_change([this, id](Engine&, Value) { pending_.insert(id); });
  try {
    std::vector<bool> everything(signals_.size(), true);
    order(everything, edges());
  } catch (...) {
    h.dispose();
    signals_.pop_back();
    throw;
  }
}

const SignalSystem::Signal* SignalSystem::find(std::string_view name) const {
  Symbol s = intern(name);
  for (auto it = signals_.rbegin(); it != signals_.rend(); ++it) {
    if (it->name == s) return &*it;
  }
  return nullptr;
}

std::vector<std::vector<std::size_t>> SignalSystem::edges() const {
  std::unordered_map<DependencyKey, std::size_t> by_target;
  for (auto& s : signals_) by_target[s.target] = s.id;
  std::vector<std::vector<std::size_t>> out(signals_.size());
  for (auto& s : signals_) {
    AExpr* ae = engine_.find_aexpr(s.monitor);
    if (!ae) continue;
    for (auto& k : ae->deps) {
      auto it = by_target.find(k);
      if (it != by_target.end()) out[it->second].push_back(s.id);
    }
  }
  return out;
}

std::vector<std::size_t> SignalSystem::depends_on(std::size_t id) const {
  auto out = edges();
  std::vector<std::size_t> result;
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (std::find(out[s].begin(), out[s].end(), id) != out[s].end()) result.push_back(s);
  }
  return result;
}

std::vector<std::size_t> SignalSystem::order(const std::vector<bool>& affected,
                                             const std::vector<std::vector<std::size_t>>& out) const {
  std::vector<std::size_t> indegree(signals_.size(), 0);
  std::size_t count = 0;
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (!affected[s]) continue;
    ++count;
    for (std::size_t t : out[s]) {
      if (affected[t]) ++indegree[t];
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t s = 0; s < out.size(); ++s) {
    if (affected[s] && indegree[s] == 0) ready.push(s);
  }
  std::vector<std::size_t> result;
  while (!ready.empty()) {
    std::size_t s = ready.top();
    ready.pop();
    result.push_back(s);
    for (std::size_t t : out[s]) {
      if (affected[t] && --indegree[t] == 0) ready.push(t);
    }
  }
  if (result.size() != count) {
    std::string names;
    for (std::size_t s = 0; s < out.size(); ++s) {
      if (affected[s] && indegree[s] > 0) names += (names.empty() ? "" : ", ") + symbol_text(signals_[s].name);
    }
    throw ReactiveError(ReactiveErrorKind::CyclicSignal, "signals depend on each other: " + names);
  }
  return result;
}

void SignalSystem::resolve() {
  if (pending_.empty()) return;
  auto out = edges();
  std::vector<bool> affected(signals_.size(), false);
  std::vector<std::size_t> stack(pending_.begin(), pending_.end());
  pending_.clear();
  while (!stack.empty()) {
    std::size_t s = stack.back();
    stack.pop_back();
    if (affected[s]) continue;
    affected[s] = true;
    for (std::size_t t : out[s]) stack.push_back(t);
  }
  for (std::size_t s : order(affected, out)) {
    Signal& sig = signals_[s];
    AExpr* ae = engine_.find_aexpr(sig.monitor);
    if (!ae) continue;
    Value v = engine_.strategy_impl().evaluate(*ae);
    ae->last = v;
    ++sig.resolutions;
    if (Scope::Binding* b = sig.scope->find_local(sig.name)) engine_.store_binding(*sig.scope, *b, v, true);
  }
}

}  // namespace rxl
