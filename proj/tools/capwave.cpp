#include <iostream>

#include "capwave/cli_io.hpp"

int main(int argc, char** argv) { return capwave::run_cli(argc, argv, std::cout, std::cerr); }
