#include <iostream>

#include "pedmap/cli.hpp"

int main(int argc, char** argv) {
  return pedmap::run_cli(argc, argv, std::cout, std::cerr);
}
