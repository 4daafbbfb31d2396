#include <iostream>

#include "sgrowth/cli.hpp"

int main(int argc, char** argv) {
  return sgrowth::cli::run(argc, argv, std::cout, std::cerr);
}
