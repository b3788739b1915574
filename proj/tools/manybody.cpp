#include <iostream>
#include <string>
#include <vector>

#include "manybody/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return manybody::cli::run(args, std::cout, std::cerr);
}
