#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace rxl {

// Interned string id. Equal ids mean equal text.
using Symbol = std::uint32_t;

Symbol intern(std::string_view text);
const std::string& symbol_text(Symbol s);

// Canonical array index encoded by the symbol text ("0", "17", never "01").
std::optional<std::uint32_t> symbol_index(Symbol s);

namespace sym {
Symbol this_();
Symbol length();
Symbol value();
Symbol constructor();
}  // namespace sym

}  // namespace rxl
