// SPDX-License-Identifier: Apache-2.0
#include "thzpoint/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
  return thzpoint::cli::run(argc, argv, std::cout, std::cerr);
}
