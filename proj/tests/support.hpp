#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "rxl/engine.hpp"

namespace rxl::test {

inline std::string data_path(const std::string& rel) { return std::string(RXL_TEST_DATA) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string output_of(StrategyKind s, const std::string& source) {
  Engine e(s);
  e.run(source);
  return e.output();
}

}  // namespace rxl::test
