#include <iostream>

#include "cans/cli.hpp"

int main(int argc, char** argv) {
  return cans::cli::run(argc, argv, std::cout, std::cerr);
}
