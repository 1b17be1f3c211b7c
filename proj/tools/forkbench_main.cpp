#include <iostream>
#include <string>
#include <vector>

#include "forkbench/bench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return forkbench::bench::main_with_args(args, std::cout, std::cerr);
}
