#include <string>
#include <vector>

#include "reportrl/cli.hpp"

int main(int argc, char** argv) {
  return reportrl::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
