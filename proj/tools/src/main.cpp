#include <iostream>

#include "tess_cli/commands.hpp"

int main(int argc, char** argv) {
  return tess::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
