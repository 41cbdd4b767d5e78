#include "pathlift/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pathlift::cli::run(args, std::cout, std::cerr, pathlift::cli::seed_from_environment());
}
