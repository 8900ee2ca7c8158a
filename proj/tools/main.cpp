#include <iostream>

#include "chase/cli.hpp"

int main(int argc, char** argv) {
  return chase::cli_main(argc, argv, std::cout, std::cerr);
}
