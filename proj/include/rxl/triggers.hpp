#pragma once

#include <functional>

#include "rxl/engine.hpp"

namespace rxl {

using TriggerCallback = std::function<void(Engine&)>;

// Fires on every falsy-to-truthy transition of the handle's result, and once at
// registration when the current result is already truthy.
void on_become_true(Engine& engine, const AExprHandle& h, TriggerCallback cb);
// Mirror of on_become_true for truthy-to-falsy transitions.
void on_become_false(Engine& engine, const AExprHandle& h, TriggerCallback cb);

Value trigger_object(Engine& engine, const AExprHandle& h);

}  // namespace rxl
