#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "rxl/ast.hpp"

namespace rxl {

inline constexpr std::string_view kHooksMarker = "use hooks";

ProgramPtr parse(std::string source);
ProgramPtr parse_shared(std::shared_ptr<const std::string> source);

// Names owned by the instrumentation: hook functions and generated temporaries.
// Only programs carrying the marker prologue may use them.
bool is_reserved_name(std::string_view name);

}  // namespace rxl
