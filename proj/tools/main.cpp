#include <iostream>

#include "nmfcheck_cli/cli.hpp"

int main(int argc, char** argv) {
  return nmfcheck::cli::dispatch(argc, argv, std::cout, std::cerr);
}
