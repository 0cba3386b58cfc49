#include <iostream>

#include "horoopt/harness/cli.hpp"

int main(int argc, char** argv) {
  return horoopt::harness::run_cli(argc, argv, std::cout, std::cerr);
}
