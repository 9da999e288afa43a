#include <iostream>

#include "dmmd/cli.hpp"

int main(int argc, char** argv) {
  return dmmd::cli::run(argc, argv, std::cout, std::cerr);
}
