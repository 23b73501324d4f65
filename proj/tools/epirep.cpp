#include <iostream>
#include <string>
#include <vector>

#include "epirep/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return epirep::cli::run(args, std::cout, std::cerr);
}
