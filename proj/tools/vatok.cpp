#include <iostream>

#include "vatok/cli.hpp"

int main(int argc, char** argv) {
  return vatok::cli::run(argc, argv, std::cout, std::cerr);
}
