#include <iostream>

#include "mutakill_cli.hpp"

int main(int argc, char** argv) {
  return mutakill::run_cli(argc, argv, std::cout, std::cerr);
}
