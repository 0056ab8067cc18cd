#include <iostream>

#include "cspe/cli.hpp"

int main(int argc, char** argv) {
  return cspe::cli_main(argc, argv, std::cin, std::cout, std::cerr);
}
