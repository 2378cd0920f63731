#include <iostream>
#include <string>
#include <vector>

#include "qgfid/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qgfid::run_cli(args, std::cout, std::cerr);
}
