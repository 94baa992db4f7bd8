#include <iostream>

#include "contest/cli.hpp"

int main(int argc, char** argv) {
  return contest::cli::run(argc, argv, std::cout, std::cerr);
}
