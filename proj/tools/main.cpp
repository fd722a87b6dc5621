#include <iostream>

#include "rectify/cli.hpp"

int main(int argc, char** argv) {
  return rectify::run_command(argc, argv, std::cout, std::cerr);
}
