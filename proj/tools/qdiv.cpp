#include <iostream>

#include "qfdiv/cli.hpp"

int main(int argc, char** argv) { return qfdiv::run_cli(argc, argv, std::cout, std::cerr); }
