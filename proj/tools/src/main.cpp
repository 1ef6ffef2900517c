#include <iostream>

#include "qmoves_app/cli.hpp"

int main(int argc, char** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return qmoves::app::run_cli(args, std::cout, std::cerr);
}
