#include <vector>
#include <string>

#include "idfield/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return idfield::cli::run(args);
}
