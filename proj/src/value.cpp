#include "rxl/value.hpp"

#include <charconv>
#include <cmath>
#include <cstring>

namespace rxl {

const char* kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::Nil: return "nil";
    case ValueKind::Bool: return "bool";
    case ValueKind::Number: return "number";
    case ValueKind::String: return "string";
    case ValueKind::Object: return "object";
    case ValueKind::Array: return "array";
    case ValueKind::Function: return "function";
    case ValueKind::Class: return "class";
  }
  return "?";
}

bool operator==(const Value& a, const Value& b) noexcept {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case ValueKind::Nil: return true;
    case ValueKind::Bool: return a.id_ == b.id_;
    case ValueKind::Number:
      if (std::isnan(a.n_)) return std::isnan(b.n_);
      return a.n_ == b.n_;
    default: return a.id_ == b.id_;
  }
}

bool strict_equals(const Value& a, const Value& b) noexcept {
  if (a.is_number() && b.is_number()) return a.as_number() == b.as_number();
  return a == b;
}

std::size_t Value::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ull;
  switch (kind_) {
    case ValueKind::Nil: return h;
    case ValueKind::Bool: return h ^ (id_ ? 1 : 2);
    case ValueKind::Number: {
      double n = n_ == 0 ? 0.0 : n_;
      if (std::isnan(n)) return h ^ 3;
      std::uint64_t bits;
      std::memcpy(&bits, &n, sizeof bits);
      return h ^ std::hash<std::uint64_t>()(bits);
    }
    default: return h ^ std::hash<std::uint32_t>()(id_);
  }
}

std::string number_to_string(double n) {
  if (std::isnan(n)) return "NaN";
  if (std::isinf(n)) return n > 0 ? "Infinity" : "-Infinity";
  if (n == 0) return "0";
  if (std::abs(n) < 1e15 && n == std::trunc(n)) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<long long>(n));
    return std::string(buf, p);
  }
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, n);
  return std::string(buf, p);
}

PropKey PropKey::name(Symbol s) noexcept {
  if (auto i = symbol_index(s)) return index(*i);
  return PropKey(s);
}

PropKey PropKey::from_value(const Value& v) {
  if (v.is_number()) {
    double n = v.as_number();
    if (n >= 0 && n < 1e9 && n == std::trunc(n)) return index(static_cast<std::uint32_t>(n));
    return name(intern(number_to_string(n)));
  }
  if (v.is_string()) return name(v.as_symbol());
  if (v.is_nil()) return name(intern("nil"));
  if (v.is_bool()) return name(intern(v.as_bool() ? "true" : "false"));
  return name(intern(std::string("<") + kind_name(v.kind()) + ">"));
}

std::string PropKey::text() const {
  if (is_index()) return std::to_string(as_index());
  return symbol_text(as_symbol());
}

Value PropKey::to_value() const {
  if (is_index()) return Value::string(intern(std::to_string(as_index())));
  return Value::string(as_symbol());
}

}  // namespace rxl
