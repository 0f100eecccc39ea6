#include <iostream>
#include <string>
#include <vector>

#include "bisep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return bisep::run_cli(args, std::cout, std::cerr);
}
