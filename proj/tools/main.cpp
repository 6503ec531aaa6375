#include "domcalc/cli.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <unistd.h>

int main(int argc, char** argv)
{
  const char* env = std::getenv("DOMCALC_COLOR");
  bool color = isatty(STDERR_FILENO) && !(env && std::strcmp(env, "0") == 0);
  std::vector<std::string> args(argv + 1, argv + argc);
  return domcalc::run_cli(args, std::cout, std::cerr, color);
}
