#include <vector>

#include "costate/cli.hpp"

int main(int argc, char** argv) {
  return costate::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
