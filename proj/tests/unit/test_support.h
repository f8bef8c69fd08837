#pragma once

#include <fstream>
#include <sstream>
#include <string>

inline std::string read_fixture(const std::string& name) {
  std::ifstream f(std::string(STRATEGIST_FIXTURE_DIR) + "/" + name, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}
