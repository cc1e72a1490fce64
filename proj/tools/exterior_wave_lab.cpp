#include <iostream>
#include <string>
#include <vector>

#include "ewl/cli_runner.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ewl::cli::run(args, std::cout, std::cerr);
}
