#include "mcgraph/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mcgraph::run_cli(argc, argv, std::cout, std::cerr); }
