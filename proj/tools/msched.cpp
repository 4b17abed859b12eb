#include <iostream>

#include "msched/cli.hpp"

int main(int argc, char** argv) {
  return msched::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
