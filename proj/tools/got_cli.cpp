#include <iostream>
#include <string>
#include <vector>

#include "got/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return got::cli::run_command(args, std::cout, std::cerr);
}
