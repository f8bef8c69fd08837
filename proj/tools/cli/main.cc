#include <iostream>

#include "commands.h"

int main(int argc, char** argv) {
  return strategist::app::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout, std::cerr);
}
