#pragma once

#include <string>

#include "rxl/ast.hpp"

namespace rxl {

// Instruments a program so that every variable and member access goes through the hook
// functions. The result carries the marker prologue and is parsed again before returning.
std::string rewrite_source(const Program& program);
ProgramPtr rewrite(const Program& program);

}  // namespace rxl
