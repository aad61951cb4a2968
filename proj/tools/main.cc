#include <string>
#include <vector>

#include "commands.h"

int main(int argc, char** argv) {
  return spoofsim::cli::Run(std::vector<std::string>(argv + 1, argv + argc));
}
