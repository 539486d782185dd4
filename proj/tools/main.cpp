#include <iostream>

#include "skewgibbs/cli.hpp"

int main(int argc, char** argv) {
  return skewgibbs::io::cli_main({argv + 1, argv + argc}, std::cout, std::cerr);
}
