#include <iostream>

#include "skel_sentinel/cli.hpp"

int main(int argc, char** argv)
{
  return sentinel::run_cli(argc, argv, std::cout, std::cerr);
}
