#include <iostream>
#include <string>
#include <vector>

#include "valsim_app/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return valsim::app::main_with_args(args, std::cout, std::cerr);
}
