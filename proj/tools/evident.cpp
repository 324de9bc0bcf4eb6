#include <cstdlib>
#include <iostream>

#include "evident/cli.hpp"

int main(int argc, char** argv) {
  evident::cli::Environment env;
  if (const char* ws = std::getenv("EVIDENT_WORKSPACE"); ws && *ws) env.workspace_override = ws;
  std::vector<std::string> args(argv + 1, argv + argc);
  int code = evident::cli::run_command(args, std::cout, std::cerr, env);
  std::cout.flush();
  return code;
}
