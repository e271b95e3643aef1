#include <iostream>

#include "obdm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return obdm::run_cli(args, std::cout, std::cerr);
}
