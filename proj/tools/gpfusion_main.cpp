#include <iostream>

#include "gpfusion/cli.hpp"

int main(int argc, char** argv) { return gpfusion::run_cli(argc, argv, std::cout, std::cerr); }
