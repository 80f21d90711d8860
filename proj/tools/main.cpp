#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ecoreport::cli::run_subcommand(args, std::cout, std::cerr);
}
