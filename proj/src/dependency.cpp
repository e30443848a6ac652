#include "rxl/dependency.hpp"

namespace rxl {

PropKey DependencyKey::prop() const noexcept { return PropKey::from_raw(slot); }

std::string DependencyKey::to_string() const {
  switch (kind) {
    case Kind::Member: return "member(#" + std::to_string(owner) + ", " + prop().text() + ")";
    case Kind::Local: return "local(@" + std::to_string(owner) + ", " + symbol_text(slot) + ")";
    case Kind::Global: return "global(" + symbol_text(slot) + ")";
  }
  return {};
}

}  // namespace rxl
