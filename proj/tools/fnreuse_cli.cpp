#include <iostream>
#include <string>
#include <vector>

#include "fnreuse/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fnreuse::run_cli(args, std::cout, std::cerr);
}
