#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rxl/value.hpp"

namespace rxl {

// One trackable storage slot: an object member, a local binding in a scope, or a global.
struct DependencyKey {
  enum class Kind : std::uint8_t { Member, Local, Global };

  Kind kind = Kind::Global;
  std::uint64_t owner = 0;  // heap id for members, scope id for locals
  std::uint32_t slot = 0;   // PropKey raw for members, Symbol otherwise

  static DependencyKey member(HeapId object, PropKey key) noexcept {
    return {Kind::Member, object, key.raw()};
  }
  static DependencyKey local(std::uint64_t scope, Symbol name) noexcept { return {Kind::Local, scope, name}; }
  static DependencyKey global(Symbol name) noexcept { return {Kind::Global, 0, name}; }

  HeapId object() const noexcept { return static_cast<HeapId>(owner); }
  std::uint64_t scope() const noexcept { return owner; }
  Symbol name() const noexcept { return slot; }
  PropKey prop() const noexcept;

  std::string to_string() const;

  friend bool operator==(const DependencyKey& a, const DependencyKey& b) noexcept {
    return a.kind == b.kind && a.owner == b.owner && a.slot == b.slot;
  }
  friend bool operator!=(const DependencyKey& a, const DependencyKey& b) noexcept { return !(a == b); }
  friend bool operator<(const DependencyKey& a, const DependencyKey& b) noexcept {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.owner != b.owner) return a.owner < b.owner;
    return a.slot < b.slot;
  }
};

}  // namespace rxl

template <>
struct std::hash<rxl::DependencyKey> {
  std::size_t operator()(const rxl::DependencyKey& k) const noexcept {
    std::size_t h = std::hash<std::uint64_t>()(k.owner * 0x9e3779b97f4a7c15ull + k.slot);
    return h ^ (static_cast<std::size_t>(k.kind) << 1);
  }
};
