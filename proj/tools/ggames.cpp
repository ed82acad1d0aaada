#include <iostream>
#include <string>
#include <vector>

#include "ggames/cli.hpp"

int main(int argc, char** argv) {
  return ggames::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
