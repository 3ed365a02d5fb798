#include "evo/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return evo::run_cli(argc, argv, std::cout, std::cerr); }
