#include <iostream>

#include "mopc/cli/cli.hpp"

int main(int argc, char** argv) {
  return mopc::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
