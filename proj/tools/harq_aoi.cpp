#include <iostream>
#include <string>
#include <vector>

#include "harq/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return harq::cli::run(args, std::cout, std::cerr);
}
