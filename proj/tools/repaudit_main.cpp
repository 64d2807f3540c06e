#include <iostream>
#include <string>
#include <vector>

#include "repaudit/cli.hpp"

int main(int argc, char** argv) {
  return repaudit::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
