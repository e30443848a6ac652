#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rxl/symbol.hpp"

namespace rxl {

using HeapId = std::uint32_t;

enum class ValueKind : std::uint8_t { Nil, Bool, Number, String, Object, Array, Function, Class };

const char* kind_name(ValueKind k);

class Value {
 public:
  constexpr Value() noexcept : kind_(ValueKind::Nil), id_(0) {}

  static constexpr Value nil() noexcept { return Value(); }
  static constexpr Value boolean(bool b) noexcept {
    Value v;
    v.kind_ = ValueKind::Bool;
    v.id_ = b ? 1 : 0;
    return v;
  }
  static constexpr Value number(double n) noexcept {
    Value v;
    v.kind_ = ValueKind::Number;
    v.n_ = n;
    return v;
  }
  static constexpr Value string(Symbol s) noexcept {
    Value v;
    v.kind_ = ValueKind::String;
    v.id_ = s;
    return v;
  }
  static Value string(std::string_view s) { return string(intern(s)); }
  static constexpr Value ref(ValueKind k, HeapId id) noexcept {
    Value v;
    v.kind_ = k;
    v.id_ = id;
    return v;
  }

  constexpr ValueKind kind() const noexcept { return kind_; }
  constexpr bool is_nil() const noexcept { return kind_ == ValueKind::Nil; }
  constexpr bool is_bool() const noexcept { return kind_ == ValueKind::Bool; }
  constexpr bool is_number() const noexcept { return kind_ == ValueKind::Number; }
  constexpr bool is_string() const noexcept { return kind_ == ValueKind::String; }
  constexpr bool is_object() const noexcept { return kind_ == ValueKind::Object; }
  constexpr bool is_array() const noexcept { return kind_ == ValueKind::Array; }
  constexpr bool is_function() const noexcept { return kind_ == ValueKind::Function; }
  constexpr bool is_class() const noexcept { return kind_ == ValueKind::Class; }
  constexpr bool is_ref() const noexcept { return kind_ >= ValueKind::Object; }
  // Objects and arrays carry properties.
  constexpr bool has_properties() const noexcept {
    return kind_ == ValueKind::Object || kind_ == ValueKind::Array;
  }

  constexpr bool as_bool() const noexcept { return id_ != 0; }
  constexpr double as_number() const noexcept { return n_; }
  constexpr Symbol as_symbol() const noexcept { return id_; }
  constexpr HeapId heap_id() const noexcept { return id_; }

  // Truthiness: nil and false are falsy, everything else is truthy.
  constexpr bool truthy() const noexcept {
    return !(kind_ == ValueKind::Nil || (kind_ == ValueKind::Bool && id_ == 0));
  }

  // Change-detection equality: primitives by value (NaN equals NaN), references by id.
  friend bool operator==(const Value& a, const Value& b) noexcept;
  friend bool operator!=(const Value& a, const Value& b) noexcept { return !(a == b); }

  std::size_t hash() const noexcept;

 private:
  ValueKind kind_;
  union {
    double n_;
    std::uint32_t id_;
  };
};

// The language's `==`: like change-detection equality but IEEE for numbers.
bool strict_equals(const Value& a, const Value& b) noexcept;

std::string number_to_string(double n);

// Property key: either a symbol or an array index (high bit set).
class PropKey {
 public:
  constexpr PropKey() noexcept = default;
  static PropKey name(Symbol s) noexcept;
  static constexpr PropKey index(std::uint32_t i) noexcept { return PropKey(i | kIndexBit); }
  static PropKey from_value(const Value& v);
  static constexpr PropKey from_raw(std::uint32_t raw) noexcept { return PropKey(raw); }

  constexpr bool is_index() const noexcept { return (raw_ & kIndexBit) != 0; }
  constexpr std::uint32_t as_index() const noexcept { return raw_ & ~kIndexBit; }
  constexpr Symbol as_symbol() const noexcept { return raw_; }
  constexpr std::uint32_t raw() const noexcept { return raw_; }
  std::string text() const;
  Value to_value() const;

  friend constexpr bool operator==(PropKey a, PropKey b) noexcept { return a.raw_ == b.raw_; }
  friend constexpr bool operator!=(PropKey a, PropKey b) noexcept { return a.raw_ != b.raw_; }
  friend constexpr bool operator<(PropKey a, PropKey b) noexcept { return a.raw_ < b.raw_; }

 private:
  static constexpr std::uint32_t kIndexBit = 0x80000000u;
  constexpr explicit PropKey(std::uint32_t raw) noexcept : raw_(raw) {}
  std::uint32_t raw_ = 0;
};

}  // namespace rxl

template <>
struct std::hash<rxl::Value> {
  std::size_t operator()(const rxl::Value& v) const noexcept { return v.hash(); }
};

template <>
struct std::hash<rxl::PropKey> {
  std::size_t operator()(rxl::PropKey k) const noexcept { return std::hash<std::uint32_t>()(k.raw()); }
};
