#include <iostream>

#include "gpuheat/cli.hpp"

int main(int argc, char** argv) {
  return gpuheat::cli::run_cli(argc, argv, std::cout, std::cerr);
}
