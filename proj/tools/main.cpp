#include <string>
#include <vector>

#include "vpclust/cli.hpp"

int main(int argc, char** argv) {
  return vpc::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
