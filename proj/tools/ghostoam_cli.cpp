#include <iostream>
#include <string>
#include <vector>

#include "ghostoam/run_config.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return ghostoam::cli::main_entry(args, std::cout, std::cerr);
}
