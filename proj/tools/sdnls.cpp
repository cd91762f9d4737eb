#include <iostream>

#include "sdnls/cli.hpp"

int main(int argc, char** argv) {
  return sdnls::cli_main(argc, argv, std::cout, std::cerr);
}
