#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "rxl/engine.hpp"

namespace rxl {

using LayerId = std::size_t;

class LayerSystem {
 public:
  // Trigger mode keeps implicit layers in the global composition via triggers; imperative
  // mode re-checks every implicit condition whenever a layered method is called.
  enum class Mode : std::uint8_t { Trigger, Imperative };

  explicit LayerSystem(Engine& engine) : engine_(engine) {}

  void install();
  void set_mode(Mode m) noexcept { mode_ = m; }
  Mode mode() const noexcept { return mode_; }

  LayerId create();
  void refine_object(LayerId layer, Value target, Value methods);
  void active_while(LayerId layer, Value condition);
  void be_global(LayerId layer);
  void be_not_global(LayerId layer);
  // Active layers, oldest activation first.
  std::vector<LayerId> current_layers();
  bool active() const noexcept { return refinements_ > 0; }

  // Runs the refinement chain for obj.key if any active layer refines it.
  std::optional<Value> dispatch(Value obj, PropKey key, Value base, std::span<const Value> args);
  Value proceed(std::span<const Value> args);
  Value layer_object(LayerId layer);

 private:
  struct Layer {
    std::map<std::pair<HeapId, std::uint32_t>, Value> partials;
    bool global = false;
    std::vector<Value> conditions;
    HeapId object = kNoHeap;
  };
  struct Frame {
    std::vector<Value> chain;
    std::size_t next;
    Value self;
    Value base;
  };

  Value step(Frame& f, std::span<const Value> args);

  Engine& engine_;
  Mode mode_ = Mode::Trigger;
  std::vector<Layer> layers_;
  std::vector<LayerId> activation_;
  std::vector<Frame> stack_;
  std::size_t refinements_ = 0;
};

}  // namespace rxl
