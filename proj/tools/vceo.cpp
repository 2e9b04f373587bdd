#include <iostream>

#include "vceo/cli.hpp"

int main(int argc, char** argv) { return vceo::run_cli(argc, argv, std::cout, std::cerr); }
