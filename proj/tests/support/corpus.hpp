#pragma once

#include <fstream>
#include <sstream>
#include <string>

namespace corpus {

inline std::string path(const std::string& name) {
  return std::string(QDBG_CORPUS_DIR) + "/" + name;
}

inline std::string load(const std::string& name) {
  std::ifstream in(path(name), std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

} // namespace corpus
