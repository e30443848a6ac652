#include "rxl/triggers.hpp"

#include <memory>

namespace rxl {

namespace {

void on_edge(Engine& engine, const AExprHandle& h, TriggerCallback cb, bool to) {
  AExpr& ae = engine.live(h);
  auto prev = std::make_shared<bool>(ae.last.truthy());
  ae.callbacks.push_back([prev, cb, to](Engine& e, Value v) {
    bool now = v.truthy();
    bool edge = now == to && *prev != to;
    *prev = now;
    if (edge) cb(e);
  });
  if (ae.last.truthy() == to) cb(engine);
}

}  // namespace

void on_become_true(Engine& engine, const AExprHandle& h, TriggerCallback cb) {
  on_edge(engine, h, std::move(cb), true);
}

void on_become_false(Engine& engine, const AExprHandle& h, TriggerCallback cb) {
  on_edge(engine, h, std::move(cb), false);
}

Value trigger_object(Engine& engine, const AExprHandle& h) {
  engine.live(h);
  return engine.new_host_object(HostKind::Trigger, h.id(), engine.prototype(HostKind::Trigger));
}

}  // namespace rxl
