#include <iostream>

#include "krawpoly/cli.hpp"

int main(int argc, char** argv) {
  return krawpoly::cli::run(argc, argv, std::cout, std::cerr);
}
